#pragma once

// Multi-label job-title classification toolkit: corpus handling, text
// pipeline, pretrained embeddings, a tape-based autodiff core, the
// Bi-GRU-LSTM-CNN model with training and checkpoints, and example-based
// F1 evaluation.

#include "jobml/adam.hpp"
#include "jobml/builtin_catalog.hpp"
#include "jobml/checkpoint.hpp"
#include "jobml/corpus.hpp"
#include "jobml/embed.hpp"
#include "jobml/error.hpp"
#include "jobml/metrics.hpp"
#include "jobml/model.hpp"
#include "jobml/rng.hpp"
#include "jobml/tape.hpp"
#include "jobml/tensor.hpp"
#include "jobml/textpipe.hpp"
#include "jobml/train.hpp"
#include "jobml/unicode.hpp"
