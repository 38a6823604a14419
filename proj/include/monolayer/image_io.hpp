#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <png.h>

#include "monolayer/errors.hpp"
#include "monolayer/image.hpp"

namespace monolayer {

enum class ImageFormat { Png, Ppm, RawF64 };

inline ImageFormat detect_format(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") return ImageFormat::Png;
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return ImageFormat::Ppm;
    if (ext == ".f64") return ImageFormat::RawF64;
    throw unsupported_error("unrecognized image extension: " + path.string());
}

namespace detail {

struct FileHandle {
    FILE* fp = nullptr;
    explicit FileHandle(FILE* f) : fp(f) {}
    ~FileHandle() {
        if (fp) std::fclose(fp);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

struct PngRead {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngRead() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

struct PngWrite {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWrite() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    }
};

inline std::uint32_t read_u32le(const unsigned char* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
           std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

inline void write_u32le(std::uint32_t v, FILE* fp) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    std::fwrite(b, 1, 4, fp);
}

inline unsigned char quantize8(double v) {
    v = std::clamp(v, 0.0, 1.0);
    return static_cast<unsigned char>(std::lround(v * 255.0));
}

}  // namespace detail

inline Image load_png(const std::filesystem::path& path) {
    FILE* raw = std::fopen(path.string().c_str(), "rb");
    if (!raw) throw io_error("cannot open " + path.string());
    detail::FileHandle file(raw);

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, file.fp) != 8 || png_sig_cmp(sig, 0, 8))
        throw format_error("not a PNG file: " + path.string());

    detail::PngRead r;
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png) throw io_error("libpng init failed");
    r.info = png_create_info_struct(r.png);
    if (!r.info) throw io_error("libpng init failed");
    if (setjmp(png_jmpbuf(r.png)))
        throw format_error("corrupt PNG file: " + path.string());

    png_init_io(r.png, file.fp);
    png_set_sig_bytes(r.png, 8);
    png_read_info(r.png, r.info);

    const int bit_depth = png_get_bit_depth(r.png, r.info);
    const int color_type = png_get_color_type(r.png, r.info);
    if (bit_depth == 16)
        throw unsupported_error("16-bit PNG not supported: " + path.string());

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(r.png);
    if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
    if (color_type & PNG_COLOR_MASK_ALPHA ||
        png_get_valid(r.png, r.info, PNG_INFO_tRNS))
        png_set_strip_alpha(r.png);
    png_read_update_info(r.png, r.info);

    const int h = static_cast<int>(png_get_image_height(r.png, r.info));
    const int w = static_cast<int>(png_get_image_width(r.png, r.info));
    const int c = png_get_channels(r.png, r.info);
    if (c != 1 && c != 3)
        throw unsupported_error("PNG channel layout not supported: " + path.string());

    Image img(h, w, c);
    std::vector<unsigned char> row(png_get_rowbytes(r.png, r.info));
    for (int y = 0; y < h; ++y) {
        png_read_row(r.png, row.data(), nullptr);
        for (std::size_t i = 0; i < static_cast<std::size_t>(w) * c; ++i)
            img.data[static_cast<std::size_t>(y) * w * c + i] = row[i] / 255.0;
    }
    png_read_end(r.png, nullptr);
    return img;
}

inline void save_png(const Image& img, const std::filesystem::path& path) {
    FILE* raw = std::fopen(path.string().c_str(), "wb");
    if (!raw) throw io_error("cannot write " + path.string());
    detail::FileHandle file(raw);

    detail::PngWrite wr;
    wr.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!wr.png) throw io_error("libpng init failed");
    wr.info = png_create_info_struct(wr.png);
    if (!wr.info) throw io_error("libpng init failed");
    if (setjmp(png_jmpbuf(wr.png)))
        throw io_error("PNG write failed: " + path.string());

    png_init_io(wr.png, file.fp);
    const int color = img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(wr.png, wr.info, img.width, img.height, 8, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(wr.png, wr.info);

    std::vector<unsigned char> row(static_cast<std::size_t>(img.width) * img.channels);
    for (int y = 0; y < img.height; ++y) {
        for (std::size_t i = 0; i < row.size(); ++i)
            row[i] = detail::quantize8(
                img.data[static_cast<std::size_t>(y) * row.size() + i]);
        png_write_row(wr.png, row.data());
    }
    png_write_end(wr.png, nullptr);
}

namespace detail {

// Parses PPM header tokens: whitespace-separated, '#' starts a comment.
inline long ppm_token(const std::vector<unsigned char>& buf, std::size_t& pos,
                      const std::string& path) {
    while (pos < buf.size()) {
        if (std::isspace(buf[pos])) {
            ++pos;
        } else if (buf[pos] == '#') {
            while (pos < buf.size() && buf[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    if (pos >= buf.size() || !std::isdigit(buf[pos]))
        throw format_error("bad PPM header: " + path);
    long v = 0;
    while (pos < buf.size() && std::isdigit(buf[pos])) {
        v = v * 10 + (buf[pos] - '0');
        if (v > 1'000'000'000L) throw format_error("bad PPM header: " + path);
        ++pos;
    }
    return v;
}

}  // namespace detail

inline Image load_ppm(const std::filesystem::path& path) {
    FILE* raw = std::fopen(path.string().c_str(), "rb");
    if (!raw) throw io_error("cannot open " + path.string());
    detail::FileHandle file(raw);
    std::fseek(file.fp, 0, SEEK_END);
    const long len = std::ftell(file.fp);
    std::fseek(file.fp, 0, SEEK_SET);
    std::vector<unsigned char> buf(static_cast<std::size_t>(std::max(0L, len)));
    if (std::fread(buf.data(), 1, buf.size(), file.fp) != buf.size())
        throw io_error("read failed: " + path.string());

    if (buf.size() < 2 || buf[0] != 'P' || (buf[1] != '5' && buf[1] != '6'))
        throw format_error("not a binary PGM/PPM file: " + path.string());
    const int channels = buf[1] == '5' ? 1 : 3;
    std::size_t pos = 2;
    const long w = detail::ppm_token(buf, pos, path.string());
    const long h = detail::ppm_token(buf, pos, path.string());
    const long maxval = detail::ppm_token(buf, pos, path.string());
    if (w <= 0 || h <= 0) throw format_error("bad PPM dimensions: " + path.string());
    if (maxval != 255)
        throw unsupported_error("only maxval 255 PPM supported: " + path.string());
    ++pos;  // single whitespace after maxval

    const std::size_t need = static_cast<std::size_t>(w) * h * channels;
    if (buf.size() - pos < need)
        throw format_error("truncated PPM data: " + path.string());
    Image img(static_cast<int>(h), static_cast<int>(w), channels);
    for (std::size_t i = 0; i < need; ++i) img.data[i] = buf[pos + i] / 255.0;
    return img;
}

inline void save_ppm(const Image& img, const std::filesystem::path& path) {
    FILE* raw = std::fopen(path.string().c_str(), "wb");
    if (!raw) throw io_error("cannot write " + path.string());
    detail::FileHandle file(raw);
    std::fprintf(file.fp, "P%c\n%d %d\n255\n", img.channels == 1 ? '5' : '6',
                 img.width, img.height);
    std::vector<unsigned char> bytes(img.data.size());
    for (std::size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = detail::quantize8(img.data[i]);
    if (std::fwrite(bytes.data(), 1, bytes.size(), file.fp) != bytes.size())
        throw io_error("write failed: " + path.string());
}

// Raw dump: little-endian u32 height, width, channels, then height*width*
// channels IEEE doubles (little-endian), row-major interleaved.
inline Image load_raw_f64(const std::filesystem::path& path) {
    FILE* raw = std::fopen(path.string().c_str(), "rb");
    if (!raw) throw io_error("cannot open " + path.string());
    detail::FileHandle file(raw);
    unsigned char head[12];
    if (std::fread(head, 1, 12, file.fp) != 12)
        throw format_error("truncated raw-f64 header: " + path.string());
    const std::uint32_t h = detail::read_u32le(head);
    const std::uint32_t w = detail::read_u32le(head + 4);
    const std::uint32_t c = detail::read_u32le(head + 8);
    if (c != 1 && c != 3)
        throw format_error("raw-f64 channels must be 1 or 3: " + path.string());
    if (h == 0 || w == 0 || h > 100'000'000u || w > 100'000'000u ||
        static_cast<std::uint64_t>(h) * w * c > 1'000'000'000ull)
        throw format_error("implausible raw-f64 dimensions: " + path.string());

    Image img(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
    std::vector<unsigned char> bytes(img.data.size() * 8);
    if (std::fread(bytes.data(), 1, bytes.size(), file.fp) != bytes.size())
        throw format_error("truncated raw-f64 data: " + path.string());
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        std::uint64_t u = 0;
        for (int b = 7; b >= 0; --b) u = (u << 8) | bytes[i * 8 + b];
        const double v = std::bit_cast<double>(u);
        if (!std::isfinite(v))
            throw format_error("non-finite value in raw-f64: " + path.string());
        img.data[i] = v;
    }
    return img;
}

inline void save_raw_f64(const Image& img, const std::filesystem::path& path) {
    FILE* raw = std::fopen(path.string().c_str(), "wb");
    if (!raw) throw io_error("cannot write " + path.string());
    detail::FileHandle file(raw);
    detail::write_u32le(static_cast<std::uint32_t>(img.height), file.fp);
    detail::write_u32le(static_cast<std::uint32_t>(img.width), file.fp);
    detail::write_u32le(static_cast<std::uint32_t>(img.channels), file.fp);
    std::vector<unsigned char> bytes(img.data.size() * 8);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        std::uint64_t u = std::bit_cast<std::uint64_t>(img.data[i]);
        for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = (u >> (8 * b)) & 0xff;
    }
    if (std::fwrite(bytes.data(), 1, bytes.size(), file.fp) != bytes.size())
        throw io_error("write failed: " + path.string());
}

inline Image load_image(const std::filesystem::path& path) {
    switch (detect_format(path)) {
        case ImageFormat::Png: return load_png(path);
        case ImageFormat::Ppm: return load_ppm(path);
        case ImageFormat::RawF64: return load_raw_f64(path);
    }
    throw unsupported_error("unreachable");
}

inline void save_image(const Image& img, const std::filesystem::path& path) {
    switch (detect_format(path)) {
        case ImageFormat::Png: save_png(img, path); return;
        case ImageFormat::Ppm: save_ppm(img, path); return;
        case ImageFormat::RawF64: save_raw_f64(img, path); return;
    }
}

}  // namespace monolayer
