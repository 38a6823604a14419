#pragma once

// Dataset loading: IDX image/label files (plain or .gz, read through zlib),
// a path,label CSV for image directories, and deterministic seeded splits.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "monolayer/degrade.hpp"
#include "monolayer/errors.hpp"
#include "monolayer/image.hpp"
#include "monolayer/image_io.hpp"
#include "monolayer/rng.hpp"

namespace monolayer {

struct Dataset {
    std::vector<Image> images;
    std::vector<int> labels;
    std::size_t size() const { return images.size(); }
};

struct DataSplit {
    Dataset train, val, test;
};

namespace detail {

struct GzFile {
    gzFile f = nullptr;
    explicit GzFile(const std::filesystem::path& path) {
        f = gzopen(path.string().c_str(), "rb");
    }
    ~GzFile() {
        if (f) gzclose(f);
    }
    GzFile(const GzFile&) = delete;
    GzFile& operator=(const GzFile&) = delete;
};

inline void gz_read_exact(gzFile f, void* buf, std::size_t n,
                          const std::string& path) {
    std::size_t done = 0;
    auto* p = static_cast<unsigned char*>(buf);
    while (done < n) {
        const unsigned chunk =
            static_cast<unsigned>(std::min<std::size_t>(n - done, 1u << 30));
        const int got = gzread(f, p + done, chunk);
        if (got <= 0) throw format_error("truncated IDX file: " + path);
        done += static_cast<std::size_t>(got);
    }
}

inline std::uint32_t read_u32be(gzFile f, const std::string& path) {
    unsigned char b[4];
    gz_read_exact(f, b, 4, path);
    return std::uint32_t(b[0]) << 24 | std::uint32_t(b[1]) << 16 |
           std::uint32_t(b[2]) << 8 | std::uint32_t(b[3]);
}

}  // namespace detail

// IDX3 (unsigned byte images): magic 0x00000803, big-endian counts.
inline std::vector<Image> read_idx_images(const std::filesystem::path& path) {
    detail::GzFile gz(path);
    if (!gz.f) throw io_error("cannot open " + path.string());
    const std::string p = path.string();
    const std::uint32_t magic = detail::read_u32be(gz.f, p);
    if (magic != 0x00000803u)
        throw format_error("bad IDX image magic in " + p + " (got " +
                           std::to_string(magic) + ", want 2051)");
    const std::uint32_t count = detail::read_u32be(gz.f, p);
    const std::uint32_t rows = detail::read_u32be(gz.f, p);
    const std::uint32_t cols = detail::read_u32be(gz.f, p);
    if (rows == 0 || cols == 0 || rows > 4096 || cols > 4096 || count > 10'000'000u)
        throw format_error("implausible IDX dimensions in " + p);
    std::vector<Image> images;
    images.reserve(count);
    std::vector<unsigned char> buf(static_cast<std::size_t>(rows) * cols);
    for (std::uint32_t i = 0; i < count; ++i) {
        detail::gz_read_exact(gz.f, buf.data(), buf.size(), p);
        Image img(static_cast<int>(rows), static_cast<int>(cols), 1);
        for (std::size_t j = 0; j < buf.size(); ++j) img.data[j] = buf[j] / 255.0;
        images.push_back(std::move(img));
    }
    return images;
}

// IDX1 (unsigned byte labels): magic 0x00000801.
inline std::vector<int> read_idx_labels(const std::filesystem::path& path) {
    detail::GzFile gz(path);
    if (!gz.f) throw io_error("cannot open " + path.string());
    const std::string p = path.string();
    const std::uint32_t magic = detail::read_u32be(gz.f, p);
    if (magic != 0x00000801u)
        throw format_error("bad IDX label magic in " + p + " (got " +
                           std::to_string(magic) + ", want 2049)");
    const std::uint32_t count = detail::read_u32be(gz.f, p);
    if (count > 10'000'000u) throw format_error("implausible IDX count in " + p);
    std::vector<unsigned char> buf(count);
    detail::gz_read_exact(gz.f, buf.data(), buf.size(), p);
    return std::vector<int>(buf.begin(), buf.end());
}

namespace detail {

// Finds file or file.gz under dir.
inline std::filesystem::path idx_path(const std::filesystem::path& dir,
                                      const std::string& base) {
    const auto plain = dir / base;
    if (std::filesystem::exists(plain)) return plain;
    const auto gz = dir / (base + ".gz");
    if (std::filesystem::exists(gz)) return gz;
    throw io_error("missing dataset file " + plain.string() + "[.gz]");
}

inline Dataset take(const std::vector<Image>& images, const std::vector<int>& labels,
                    const std::vector<std::size_t>& order, std::size_t from,
                    std::size_t count) {
    Dataset d;
    d.images.reserve(count);
    d.labels.reserve(count);
    for (std::size_t i = from; i < from + count; ++i) {
        d.images.push_back(images[order[i]]);
        d.labels.push_back(labels[order[i]]);
    }
    return d;
}

}  // namespace detail

struct SplitCounts {
    std::size_t train = 0, val = 0, test = 0;
};

// Standard split of the 60k/10k IDX pair: 48000/12000 carved out of the
// training file by seeded shuffle, the full test file as test. Desk-scale
// counts subsample the same shuffles.
inline DataSplit load_mnist_split(const std::filesystem::path& dir,
                                  std::uint64_t seed,
                                  const SplitCounts& counts = {}) {
    const auto train_images =
        read_idx_images(detail::idx_path(dir, "train-images-idx3-ubyte"));
    const auto train_labels =
        read_idx_labels(detail::idx_path(dir, "train-labels-idx1-ubyte"));
    const auto test_images =
        read_idx_images(detail::idx_path(dir, "t10k-images-idx3-ubyte"));
    const auto test_labels =
        read_idx_labels(detail::idx_path(dir, "t10k-labels-idx1-ubyte"));
    if (train_images.size() != train_labels.size() ||
        test_images.size() != test_labels.size())
        throw format_error("image/label count mismatch in " + dir.string());

    const std::size_t n_train_file = train_images.size();
    const std::size_t default_val = n_train_file / 5;
    SplitCounts c = counts;
    if (c.train == 0) c.train = n_train_file - default_val;
    if (c.val == 0) c.val = default_val;
    if (c.test == 0) c.test = test_images.size();
    if (c.train + c.val > n_train_file || c.test > test_images.size())
        throw std::invalid_argument("load_mnist_split: counts exceed dataset size");

    std::vector<std::size_t> order(n_train_file);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng(derive_seed(seed, "split-train")).shuffle(order);
    std::vector<std::size_t> test_order(test_images.size());
    for (std::size_t i = 0; i < test_order.size(); ++i) test_order[i] = i;
    Rng(derive_seed(seed, "split-test")).shuffle(test_order);

    DataSplit split;
    split.train = detail::take(train_images, train_labels, order, 0, c.train);
    split.val = detail::take(train_images, train_labels, order, c.train, c.val);
    split.test = detail::take(test_images, test_labels, test_order, 0, c.test);
    return split;
}

// CSV rows "relative/path,label"; '#' lines and blanks skipped. Paths are
// resolved against the CSV's directory.
inline Dataset load_labeled_images(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw io_error("cannot open " + csv_path.string());
    const auto base = csv_path.parent_path();
    Dataset d;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos)
            throw format_error("missing comma at " + csv_path.string() + ":" +
                               std::to_string(lineno));
        const std::string rel = line.substr(0, comma);
        int label = 0;
        try {
            label = std::stoi(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw format_error("bad label at " + csv_path.string() + ":" +
                               std::to_string(lineno));
        }
        if (label < 0)
            throw format_error("negative label at " + csv_path.string() + ":" +
                               std::to_string(lineno));
        d.images.push_back(load_image(base / rel));
        d.labels.push_back(label);
    }
    return d;
}

// Seeded shuffle then split by the same 48:12:10 proportions as the standard
// split (explicit counts override).
inline DataSplit split_dataset(const Dataset& d, std::uint64_t seed,
                               const SplitCounts& counts = {}) {
    std::vector<std::size_t> order(d.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng(derive_seed(seed, "split")).shuffle(order);
    SplitCounts c = counts;
    if (c.train == 0 && c.val == 0 && c.test == 0) {
        c.train = d.size() * 48 / 70;
        c.val = d.size() * 12 / 70;
        c.test = d.size() - c.train - c.val;
    }
    if (c.train + c.val + c.test > d.size())
        throw std::invalid_argument("split_dataset: counts exceed dataset size");
    DataSplit s;
    s.train = detail::take(d.images, d.labels, order, 0, c.train);
    s.val = detail::take(d.images, d.labels, order, c.train, c.val);
    s.test = detail::take(d.images, d.labels, order, c.train + c.val, c.test);
    return s;
}

// Applies one degradation spec to every image; image i uses seed
// spec.rng_seed ^ i.
inline Dataset degrade_dataset(const Dataset& d, const DegradationSpec& spec) {
    Dataset out;
    out.labels = d.labels;
    out.images.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        out.images[i] = degrade_apply_indexed(d.images[i], spec, i);
    return out;
}

}  // namespace monolayer
