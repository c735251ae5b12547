#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace evosal {

struct DatasetItem {
    std::string stem;
    std::filesystem::path image;
    std::filesystem::path ground_truth;
};

/// Images in <root>/images and masks in <root>/gt, paired by file stem.
struct Dataset {
    std::filesystem::path root;
    std::vector<DatasetItem> items;        // sorted by stem
    std::vector<std::string> unpaired;     // files without a partner, for reporting
};

/// Throws DataError when either directory is missing.
Dataset scan_dataset(const std::filesystem::path& root);

bool is_image_file(const std::filesystem::path& path);

} // namespace evosal
