#pragma once

#include <array>
#include <string_view>

namespace jobml {

// The 68 canonical job titles, in catalog order. Index 0 is
// "An Ninh / Bảo Vệ (Security)"; index order is part of any trained model's
// contract and must never change.
inline constexpr std::array<std::string_view, 68> kBuiltinJobTitles = {
    "An Ninh / Bảo Vệ (Security)",
    "An toàn lao động (HSE)",
    "Biên phiên dịch (Interpreter/ Translator)",
    "Bán hàng / Kinh doanh (Sales / Business Development)",
    "Bán lẻ / Bán sỉ (Retail / Wholesale)",
    "Bưu chính viễn thông (Telecommunications)",
    "Bảo hiểm (Insurance)",
    "Bảo trì / Sửa chữa (Maintenance)",
    "Bất động sản (Real Estate)",
    "CNTT - Phần cứng / Mạng (IT - Hardware / Network)",
    "CNTT - Phần mềm (IT - Software)",
    "Chăn nuôi / Thú y (Animal Husbandry / Veterinary)",
    "Chứng khoán (Securities)",
    "Công nghệ sinh học (Biotechnology)",
    "Công nghệ thực phẩm / Dinh dưỡng (Food Tech / Nutritionist)",
    "Cơ khí / Ô tô / Tự động hóa (Mechanical / Auto / Automotive)",
    "Du lịch (Tourism)",
    "Dược phẩm (Pharmacy)",
    "Dầu khí (Oil / Gas)",
    "Dệt may / Da giày / Thời trang (Textiles / Garments / Fashion)",
    "Dịch vụ khách hàng (Customer Service)",
    "Giáo dục / Đào tạo (Education /Training)",
    "Giải trí (Entertainment)",
    "Hàng gia dụng / Chăm sóc cá nhân (Household / Personal Care)",
    "Hàng hải (Marine)",
    "Hàng không (Aviation)",
    "Hành chính / Thư ký (Administrative / Clerical)",
    "Hóa học (Chemical Eng.)",
    "In ấn / Xuất bản (Printing / Publishing)",
    "Khoáng sản (Mineral)",
    "Kiến trúc (Architect)",
    "Kế toán / Kiểm toán (Accounting / Auditing / Tax)",
    "Lao động phổ thông (Unskilled Workers)",
    "Luật / Pháp lý (Law / Legal Services)",
    "Lâm Nghiệp (Forestry)",
    "Môi trường (Environmental)",
    "Mới tốt nghiệp / Thực tập (Entry Level / Internship)",
    "Mỹ thuật / Nghệ thuật / Thiết kế (Arts / Creative Design)",
    "Ngành khác (Others)",
    "Ngân hàng (Banking)",
    "Nhà hàng / Khách sạn (Restaurant / Hotel)",
    "Nhân sự (Human Resources)",
    "Nông nghiệp (Agriculture)",
    "Nội ngoại thất (Interior / Exterior)",
    "Phi chính phủ / Phi lợi nhuận (NGO / Non-Profit)",
    "Quản lý chất lượng (Quality Control - QA/QC)",
    "Quản lý điều hành (Executive management)",
    "Quảng cáo / Đối ngoại / Truyền Thông (Advertising / PR / Communications)",
    "Sản xuất / Vận hành sản xuất (Manufacturing / Process)",
    "Thu mua / Vật tư (Purchasing / Merchandising)",
    "Thư viện (Library)",
    "Thống kê (Statistics)",
    "Thủy lợi (Irrigation)",
    "Thủy sản / Hải sản (Fishery)",
    "Thực phẩm & Đồ uống (Food & Beverage - F&B)",
    "Tiếp thị / Marketing (Marketing)",
    "Tiếp thị trực tuyến (Online Marketing)",
    "Truyền hình / Báo chí / Biên tập (TV / Newspaper / Editors)",
    "Trắc địa / Địa Chất (Surveying / Geology)",
    "Tài chính / Đầu tư (Finance / Investment)",
    "Tư vấn (Consulting)",
    "Tổ chức sự kiện (Event)",
    "Vận chuyển / Giao nhận / Kho vận (Freight / Logistics / Warehouse)",
    "Xuất nhập khẩu (Import / Export)",
    "Xây dựng (Civil / Construction)",
    "Y tế / Chăm sóc sức khỏe (Medical / Healthcare)",
    "Điện / Điện tử / Điện lạnh (Electrical / Electronics)",
    "Đồ gỗ (Wood)",
};

}  // namespace jobml
