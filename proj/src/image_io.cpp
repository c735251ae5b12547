#include "evosal/image_io.hpp"

#include "evosal/errors.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>

namespace evosal {

namespace {

cv::Mat read_raw(const std::filesystem::path& path)
{
    cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (img.empty())
        throw IoError("cannot read image: " + path.string());
    return img;
}

double depth_scale(const cv::Mat& img)
{
    switch (img.depth()) {
    case CV_8U:
        return 1.0 / 255.0;
    case CV_16U:
        return 1.0 / 65535.0;
    case CV_32F:
    case CV_64F:
        return 1.0;
    default:
        throw IoError("unsupported pixel depth");
    }
}

double sample(const cv::Mat& img, int x, int y, int c)
{
    switch (img.depth()) {
    case CV_8U:
        return img.ptr<std::uint8_t>(y)[x * img.channels() + c];
    case CV_16U:
        return img.ptr<std::uint16_t>(y)[x * img.channels() + c];
    case CV_32F:
        return img.ptr<float>(y)[x * img.channels() + c];
    case CV_64F:
        return img.ptr<double>(y)[x * img.channels() + c];
    default:
        throw IoError("unsupported pixel depth");
    }
}

void write_or_throw(const std::filesystem::path& path, const cv::Mat& mat)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), mat);
    } catch (const cv::Exception& e) {
        throw IoError("cannot write " + path.string() + ": " + e.what());
    }
    if (!ok)
        throw IoError("cannot write " + path.string());
}

std::uint8_t to_byte(double v)
{
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

} // namespace

RgbImage read_rgb(const std::filesystem::path& path)
{
    const cv::Mat img = read_raw(path);
    const double scale = depth_scale(img);
    const int w = img.cols;
    const int h = img.rows;
    RgbImage out{ScalarMap(w, h), ScalarMap(w, h), ScalarMap(w, h)};
    const int ch = img.channels();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (ch < 3) {
                const double v = std::clamp(sample(img, x, y, 0) * scale, 0.0, 1.0);
                out.r(x, y) = out.g(x, y) = out.b(x, y) = v;
            } else {
                // OpenCV stores BGR(A).
                out.b(x, y) = std::clamp(sample(img, x, y, 0) * scale, 0.0, 1.0);
                out.g(x, y) = std::clamp(sample(img, x, y, 1) * scale, 0.0, 1.0);
                out.r(x, y) = std::clamp(sample(img, x, y, 2) * scale, 0.0, 1.0);
            }
        }
    return out;
}

ScalarMap read_gray(const std::filesystem::path& path)
{
    const cv::Mat img = read_raw(path);
    const double scale = depth_scale(img);
    const int ch = std::min(img.channels(), 3);
    ScalarMap out(img.cols, img.rows);
    for (int y = 0; y < img.rows; ++y)
        for (int x = 0; x < img.cols; ++x) {
            double acc = 0.0;
            for (int c = 0; c < ch; ++c)
                acc += sample(img, x, y, c);
            out(x, y) = std::clamp(acc / ch * scale, 0.0, 1.0);
        }
    return out;
}

LabelImage read_labels(const std::filesystem::path& path)
{
    const cv::Mat img = read_raw(path);
    if (img.depth() != CV_8U && img.depth() != CV_16U)
        throw IoError("label raster must be 8- or 16-bit: " + path.string());
    LabelImage out{img.cols, img.rows, {}};
    out.labels.reserve(static_cast<std::size_t>(img.cols) * img.rows);
    for (int y = 0; y < img.rows; ++y)
        for (int x = 0; x < img.cols; ++x)
            out.labels.push_back(static_cast<std::int32_t>(sample(img, x, y, 0)));
    return out;
}

ColorDecomposition load_image(const std::filesystem::path& path)
{
    return decompose(read_rgb(path));
}

GroundTruth binarize_ground_truth(const ScalarMap& gray, int target_width, int target_height)
{
    ScalarMap bin = map_unary(gray, [](double v) { return v >= 0.5 ? 1.0 : 0.0; });
    if (bin.width() != target_width || bin.height() != target_height)
        bin = resize_nearest(bin, target_width, target_height);
    return GroundTruth{std::move(bin)};
}

GroundTruth load_ground_truth(const std::filesystem::path& path, int target_width, int target_height)
{
    return binarize_ground_truth(read_gray(path), target_width, target_height);
}

void write_png(const std::filesystem::path& path, const ScalarMap& map)
{
    cv::Mat mat(map.height(), map.width(), CV_8UC1);
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
            mat.at<std::uint8_t>(y, x) = to_byte(map(x, y));
    write_or_throw(path, mat);
}

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image)
{
    cv::Mat mat(image.height(), image.width(), CV_8UC3);
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            mat.at<cv::Vec3b>(y, x) = cv::Vec3b(to_byte(image.b(x, y)), to_byte(image.g(x, y)), to_byte(image.r(x, y)));
    write_or_throw(path, mat);
}

void write_label_png(const std::filesystem::path& path, const LabelImage& labels)
{
    cv::Mat mat(labels.height, labels.width, CV_16UC1);
    for (int y = 0; y < labels.height; ++y)
        for (int x = 0; x < labels.width; ++x) {
            const auto v = labels.labels[static_cast<std::size_t>(y) * labels.width + x];
            if (v < 0 || v > 65535)
                throw ContractViolation("label out of 16-bit range");
            mat.at<std::uint16_t>(y, x) = static_cast<std::uint16_t>(v);
        }
    write_or_throw(path, mat);
}

} // namespace evosal
