#include "dapip/config.hpp"

#include <cstdlib>

#ifndef DAPIP_DATA_DIR
#define DAPIP_DATA_DIR "data"
#endif
#ifndef DAPIP_INSTALLED_DATA_DIR
#define DAPIP_INSTALLED_DATA_DIR DAPIP_DATA_DIR
#endif

namespace dapip {

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("DAPIP_DATA_DIR"); env && *env) {
    return std::filesystem::path(env);
  }
  std::filesystem::path build_tree(DAPIP_DATA_DIR);
  std::error_code ec;
  if (std::filesystem::is_directory(build_tree, ec)) return build_tree;
  return std::filesystem::path(DAPIP_INSTALLED_DATA_DIR);
}

}  // namespace dapip
