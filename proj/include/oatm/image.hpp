#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oatm/errors.hpp"

namespace oatm {

struct PixelCoord {
    int x = 0;  // column
    int y = 0;  // row

    bool operator==(const PixelCoord&) const = default;
};

// Immutable grayscale raster, row-major, intensities in [0,1].
// "Greylevels" on the 0-255 scale convert at 1/255.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::vector<double> pixels);

    static GrayImage constant(int width, int height, double value);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return pixels_.size(); }

    double at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
    const std::vector<double>& pixels() const { return pixels_; }

    bool contains(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> pixels_;
};

// Binary PGM (P5), maxval 255, the only supported file format.
// Written header is exactly "P5\n<width> <height>\n255\n".
GrayImage load_pgm(const std::string& path);
void save_pgm(const GrayImage& img, const std::string& path);

// Intensity at q, absent when q is outside the image domain. Total for any
// integer coordinate.
std::optional<double> sample(const GrayImage& img, PixelCoord q);

}  // namespace oatm
