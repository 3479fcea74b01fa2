#pragma once

#include <string_view>

namespace hazardqa::assets {

/// Contents of assets/templates.txt, compiled in.
std::string_view default_templates();

/// Contents of assets/stopwords.txt, compiled in.
std::string_view default_stopwords();

}  // namespace hazardqa::assets
