#pragma once

namespace karnet::detail {

extern const char* const iris_csv;

} // namespace karnet::detail
