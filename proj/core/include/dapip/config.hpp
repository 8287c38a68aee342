#pragma once

#include <filesystem>

namespace dapip {

/// Root of the bundled data files. $DAPIP_DATA_DIR overrides the path
/// compiled into the library.
std::filesystem::path default_data_dir();

}  // namespace dapip
