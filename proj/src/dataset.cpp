#include "evosal/dataset.hpp"

#include "evosal/errors.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace evosal {

namespace fs = std::filesystem;

bool is_image_file(const fs::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".ppm" || ext == ".pgm"
           || ext == ".tif" || ext == ".tiff";
}

namespace {

std::map<std::string, fs::path> images_by_stem(const fs::path& dir, std::vector<std::string>& duplicates)
{
    if (!fs::is_directory(dir))
        throw DataError("missing dataset directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && is_image_file(e.path()))
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::map<std::string, fs::path> out;
    for (const auto& f : files)
        if (!out.emplace(f.stem().string(), f).second)
            duplicates.push_back(f.string() + " (duplicate stem)");
    return out;
}

} // namespace

Dataset scan_dataset(const fs::path& root)
{
    Dataset ds;
    ds.root = root;
    const auto images = images_by_stem(root / "images", ds.unpaired);
    const auto masks = images_by_stem(root / "gt", ds.unpaired);
    for (const auto& [stem, path] : images) {
        if (const auto it = masks.find(stem); it != masks.end())
            ds.items.push_back({stem, path, it->second});
        else
            ds.unpaired.push_back(path.string());
    }
    for (const auto& [stem, path] : masks)
        if (!images.contains(stem))
            ds.unpaired.push_back(path.string());
    return ds;
}

} // namespace evosal
