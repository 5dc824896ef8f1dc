#pragma once

#include <string_view>

namespace cgmap::wordlists {

// Names of the shipped lists: "c", "java", "programming", "stopwords".
// Contents are compiled in from data/wordlists/<name>.txt.
std::string_view embedded(std::string_view name);

// Environment variable naming a directory of <name>.txt files that take
// precedence over the compiled-in lists.
inline constexpr const char* directory_env = "CGMAP_WORDLIST_DIR";

}  // namespace cgmap::wordlists
