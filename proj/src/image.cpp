#include "oatm/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "oatm/transform.hpp"

namespace oatm {

GrayImage::GrayImage(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width_ <= 0 || height_ <= 0)
        throw ContractViolation("GrayImage: non-positive dimensions");
    if (pixels_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
        throw ContractViolation("GrayImage: pixel count does not match dimensions");
    for (double v : pixels_) {
        if (!(v >= 0.0 && v <= 1.0))
            throw ContractViolation("GrayImage: intensity outside [0,1]");
    }
}

GrayImage GrayImage::constant(int width, int height, double value) {
    return GrayImage(width, height,
                     std::vector<double>(static_cast<std::size_t>(width) * height, value));
}

namespace {

// Reads one PNM token, skipping whitespace and '#' comments.
bool next_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (!std::isspace(c)) break;
    }
    if (c == EOF) return false;
    do {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    } while (c != EOF && !std::isspace(c) && c != '#');
    if (c == '#') in.unget();
    return true;
}

long parse_dim(const std::string& tok) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw PgmError(PgmError::Kind::MalformedHeader, "PGM: non-numeric header field '" + tok + "'");
    long v = std::strtol(tok.c_str(), nullptr, 10);
    if (v <= 0 || v > 1000000)
        throw PgmError(PgmError::Kind::MalformedHeader, "PGM: dimension out of range: " + tok);
    return v;
}

}  // namespace

GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PgmError(PgmError::Kind::Io, "PGM: cannot open " + path);

    std::string magic;
    if (!next_token(in, magic)) throw PgmError(PgmError::Kind::MalformedHeader, "PGM: empty file");
    if (magic != "P5")
        throw PgmError(PgmError::Kind::MalformedHeader, "PGM: expected P5 magic, got '" + magic + "'");

    std::string wtok, htok, mtok;
    if (!next_token(in, wtok) || !next_token(in, htok) || !next_token(in, mtok))
        throw PgmError(PgmError::Kind::MalformedHeader, "PGM: incomplete header");
    const long w = parse_dim(wtok);
    const long h = parse_dim(htok);
    if (mtok.find_first_not_of("0123456789") != std::string::npos)
        throw PgmError(PgmError::Kind::MalformedHeader, "PGM: non-numeric maxval");
    const long maxval = std::strtol(mtok.c_str(), nullptr, 10);
    if (maxval != 255)
        throw PgmError(PgmError::Kind::UnsupportedMaxval,
                       "PGM: unsupported maxval " + std::to_string(maxval) + " (only 255)");
    if (w * h > 100000000L)
        throw PgmError(PgmError::Kind::MalformedHeader, "PGM: image too large");

    // Exactly one whitespace byte separates the header from the payload; the
    // token reader has consumed it already.
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    std::vector<unsigned char> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw PgmError(PgmError::Kind::TruncatedPayload,
                       "PGM: expected " + std::to_string(n) + " payload bytes, got " +
                           std::to_string(in.gcount()));

    std::vector<double> px(n);
    for (std::size_t i = 0; i < n; ++i) px[i] = raw[i] / 255.0;
    return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

void save_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PgmError(PgmError::Kind::Io, "PGM: cannot open " + path + " for writing");
    out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
    std::vector<unsigned char> raw(img.size());
    const auto& px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i)
        raw[i] = static_cast<unsigned char>(std::lround(px[i] * 255.0));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw PgmError(PgmError::Kind::Io, "PGM: write failure on " + path);
}

std::optional<double> sample(const GrayImage& img, PixelCoord q) {
    if (!img.contains(q.x, q.y)) return std::nullopt;
    return img.at(q.x, q.y);
}

double residual(const GrayImage& tmpl, const GrayImage& image, const Transform& f, PixelCoord p) {
    if (!tmpl.contains(p.x, p.y))
        throw ContractViolation("residual: p outside template domain");
    const auto v = sample(image, apply(f, p));
    if (!v) return std::numeric_limits<double>::infinity();
    return std::abs(tmpl.at(p.x, p.y) - *v);
}

}  // namespace oatm
