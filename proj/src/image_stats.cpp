#include "learnorder/image_stats.hpp"

#include "learnorder/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace learnorder {

// ---------------------------------------------------------------------------
// Local entropy

namespace {

std::uint8_t intensity_bin(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

double histogram_entropy(const std::array<std::uint32_t, 256>& hist, double total) {
    double h = 0.0;
    for (std::uint32_t c : hist) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h;
}

} // namespace

double mean_local_entropy(const GrayImage& image, std::size_t window) {
    if (window == 0) throw Error(ErrorCode::InvalidArgument, "entropy window must be positive");
    const std::size_t W = image.width(), H = image.height();
    if (window > std::min(W, H)) {
        throw Error(ErrorCode::WindowTooLarge,
                    fmt::format("window {} exceeds {}x{} image", window, W, H));
    }
    std::vector<std::uint8_t> bins(image.size());
    std::transform(image.pixels().begin(), image.pixels().end(), bins.begin(), intensity_bin);

    const double area = static_cast<double>(window * window);
    double sum = 0.0;
    std::array<std::uint32_t, 256> hist{};
    for (std::size_t y0 = 0; y0 + window <= H; ++y0) {
        hist.fill(0);
        for (std::size_t y = y0; y < y0 + window; ++y) {
            for (std::size_t x = 0; x < window; ++x) ++hist[bins[y * W + x]];
        }
        sum += histogram_entropy(hist, area);
        for (std::size_t x0 = 1; x0 + window <= W; ++x0) {
            for (std::size_t y = y0; y < y0 + window; ++y) {
                --hist[bins[y * W + x0 - 1]];
                ++hist[bins[y * W + x0 + window - 1]];
            }
            sum += histogram_entropy(hist, area);
        }
    }
    const double positions = static_cast<double>((W - window + 1) * (H - window + 1));
    return sum / positions;
}

// ---------------------------------------------------------------------------
// Segmentation

namespace {

std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
    const auto period = static_cast<std::ptrdiff_t>(2 * n);
    std::ptrdiff_t m = i % period;
    if (m < 0) m += period;
    if (m >= static_cast<std::ptrdiff_t>(n)) m = period - 1 - m;
    return static_cast<std::size_t>(m);
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1), rank_(n, 0), count_(n) {
        std::iota(parent_.begin(), parent_.end(), 0u);
    }

    std::uint32_t find(std::uint32_t x) {
        std::uint32_t root = x;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[x] != root) {
            const auto next = parent_[x];
            parent_[x] = root;
            x = next;
        }
        return root;
    }

    // Returns the surviving root.
    std::uint32_t join(std::uint32_t a, std::uint32_t b) {
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        if (rank_[a] == rank_[b]) ++rank_[a];
        --count_;
        return a;
    }

    std::size_t size(std::uint32_t root) const { return size_[root]; }
    std::size_t count() const { return count_; }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::size_t> size_;
    std::vector<std::uint8_t> rank_;
    std::size_t count_;
};

} // namespace

GrayImage gaussian_smooth(const GrayImage& image, double sigma) {
    if (!(sigma > 0.0)) return image;
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
        kernel[static_cast<std::size_t>(i + radius)] =
            std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
    }
    const double norm = std::accumulate(kernel.begin(), kernel.end(), 0.0);
    for (double& k : kernel) k /= norm;

    const std::size_t W = image.width(), H = image.height();
    std::vector<double> tmp(W * H), out(W * H);
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
                const auto xs = reflect_index(static_cast<std::ptrdiff_t>(x) + i, W);
                acc += kernel[static_cast<std::size_t>(i + radius)] * image(xs, y);
            }
            tmp[y * W + x] = acc;
        }
    }
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
                const auto ys = reflect_index(static_cast<std::ptrdiff_t>(y) + i, H);
                acc += kernel[static_cast<std::size_t>(i + radius)] * tmp[ys * W + x];
            }
            out[y * W + x] = acc;
        }
    }
    return GrayImage(W, H, std::move(out));
}

std::vector<GridEdge> grid_edges(const std::vector<GrayImage>& channels) {
    if (channels.empty()) throw Error(ErrorCode::InvalidArgument, "no image channels");
    const std::size_t W = channels.front().width(), H = channels.front().height();
    for (const auto& c : channels) {
        if (c.width() != W || c.height() != H) {
            throw Error(ErrorCode::InvalidArgument, "channel extents differ");
        }
    }
    auto distance = [&](std::size_t x1, std::size_t y1, std::size_t x2, std::size_t y2) {
        double ss = 0.0;
        for (const auto& c : channels) {
            const double d = c(x1, y1) - c(x2, y2);
            ss += d * d;
        }
        return std::sqrt(ss);
    };
    auto id = [W](std::size_t x, std::size_t y) { return static_cast<std::uint32_t>(y * W + x); };

    std::vector<GridEdge> edges;
    edges.reserve(W * H * 4);
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
            if (x + 1 < W) edges.push_back({id(x, y), id(x + 1, y), distance(x, y, x + 1, y)});
            if (y + 1 < H) edges.push_back({id(x, y), id(x, y + 1), distance(x, y, x, y + 1)});
            if (x + 1 < W && y + 1 < H) {
                edges.push_back({id(x, y), id(x + 1, y + 1), distance(x, y, x + 1, y + 1)});
            }
            if (x + 1 < W && y > 0) {
                edges.push_back({id(x, y), id(x + 1, y - 1), distance(x, y, x + 1, y - 1)});
            }
        }
    }
    return edges;
}

Segmentation segment(const std::vector<GrayImage>& channels, const SegmentationParams& params) {
    if (channels.empty() || channels.front().empty()) {
        throw Error(ErrorCode::InvalidArgument, "segmentation needs a non-empty image");
    }
    std::vector<GrayImage> smoothed;
    smoothed.reserve(channels.size());
    for (const auto& c : channels) smoothed.push_back(gaussian_smooth(c, params.sigma));

    auto edges = grid_edges(smoothed);
    std::stable_sort(edges.begin(), edges.end(),
                     [](const GridEdge& l, const GridEdge& r) { return l.weight < r.weight; });

    const std::size_t V = channels.front().size();
    DisjointSets sets(V);
    std::vector<double> threshold(V, params.scale_k);
    for (const auto& e : edges) {
        const auto a = sets.find(e.a);
        const auto b = sets.find(e.b);
        if (a == b) continue;
        if (e.weight <= threshold[a] && e.weight <= threshold[b]) {
            const auto root = sets.join(a, b);
            threshold[root] = e.weight + params.scale_k / static_cast<double>(sets.size(root));
        }
    }
    for (const auto& e : edges) {
        const auto a = sets.find(e.a);
        const auto b = sets.find(e.b);
        if (a != b && (sets.size(a) < params.min_size || sets.size(b) < params.min_size)) {
            sets.join(a, b);
        }
    }

    Segmentation out;
    out.labels.resize(V);
    std::vector<std::uint32_t> dense(V, UINT32_MAX);
    std::uint32_t next = 0;
    for (std::uint32_t v = 0; v < V; ++v) {
        const auto root = sets.find(v);
        if (dense[root] == UINT32_MAX) dense[root] = next++;
        out.labels[v] = dense[root];
    }
    out.count = sets.count();
    return out;
}

std::size_t segment_count(const RgbImage& image, const SegmentationParams& params) {
    if (image.width == 0 || image.height == 0) {
        throw Error(ErrorCode::InvalidArgument, "segmentation needs a non-empty image");
    }
    std::vector<GrayImage> channels;
    for (std::size_t c = 0; c < 3; ++c) {
        std::vector<double> plane(image.width * image.height);
        for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = image.rgb[i * 3 + c];
        channels.emplace_back(image.width, image.height, std::move(plane));
    }
    return segment(channels, params).count;
}

std::size_t segment_count(const GrayImage& image, const SegmentationParams& params) {
    return segment({image}, params).count;
}

// ---------------------------------------------------------------------------
// DCT

namespace {

// Orthonormal DCT-II basis: row u holds alpha(u) cos(pi (2x+1) u / 2n).
std::vector<double> dct_basis(std::size_t n) {
    std::vector<double> basis(n * n);
    const double pi = std::acos(-1.0);
    for (std::size_t u = 0; u < n; ++u) {
        const double alpha = u == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        for (std::size_t x = 0; x < n; ++x) {
            basis[u * n + x] =
                alpha * std::cos(pi * static_cast<double>((2 * x + 1) * u) / (2.0 * n));
        }
    }
    return basis;
}

} // namespace

std::vector<double> dct2(const GrayImage& image) {
    const std::size_t W = image.width(), H = image.height();
    const auto bw = dct_basis(W);
    const auto bh = dct_basis(H);
    const auto& px = image.pixels();

    std::vector<double> rows(W * H, 0.0); // rows[y][u]
    for (std::size_t y = 0; y < H; ++y) {
        const double* src = &px[y * W];
        for (std::size_t u = 0; u < W; ++u) {
            const double* b = &bw[u * W];
            double acc = 0.0;
            for (std::size_t x = 0; x < W; ++x) acc += b[x] * src[x];
            rows[y * W + u] = acc;
        }
    }
    std::vector<double> out(W * H, 0.0); // out[v][u]
    for (std::size_t v = 0; v < H; ++v) {
        const double* b = &bh[v * H];
        double* dst = &out[v * W];
        for (std::size_t y = 0; y < H; ++y) {
            const double w = b[y];
            const double* src = &rows[y * W];
            for (std::size_t u = 0; u < W; ++u) dst[u] += w * src[u];
        }
    }
    return out;
}

DctEnergy dct_energy_percentage(const GrayImage& image, double energy_fraction) {
    if (image.empty()) throw Error(ErrorCode::InvalidArgument, "DCT needs a non-empty image");
    if (!(energy_fraction > 0.0 && energy_fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("energy fraction {} outside (0, 1]", energy_fraction));
    }
    const auto coeffs = dct2(image);
    const std::size_t total_count = coeffs.size();

    std::vector<std::size_t> order(total_count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(coeffs[a]), mb = std::abs(coeffs[b]);
        return ma != mb ? ma > mb : a < b;
    });

    std::vector<double> cumulative(total_count);
    double running = 0.0;
    for (std::size_t i = 0; i < total_count; ++i) {
        running += coeffs[order[i]] * coeffs[order[i]];
        cumulative[i] = running;
    }
    const double total_norm = std::sqrt(running);
    DctEnergy out;
    if (total_norm == 0.0) {
        out.coefficients = 1;
        out.degenerate = true;
    } else {
        const double target = energy_fraction * total_norm;
        std::size_t c = total_count;
        for (std::size_t i = 0; i < total_count; ++i) {
            if (std::sqrt(cumulative[i]) >= target) {
                c = i + 1;
                break;
            }
        }
        out.coefficients = c;
    }
    out.fraction = static_cast<double>(out.coefficients) / static_cast<double>(total_count);
    return out;
}

// ---------------------------------------------------------------------------
// Sobel edges

double edge_strength_sum(const GrayImage& image) {
    const std::size_t W = image.width(), H = image.height();
    if (W < 3 || H < 3) {
        throw Error(ErrorCode::ImageTooSmall,
                    fmt::format("edge strength needs at least 3x3 pixels, got {}x{}", W, H));
    }
    double sum = 0.0;
    for (std::size_t y = 1; y + 1 < H; ++y) {
        for (std::size_t x = 1; x + 1 < W; ++x) {
            const double gx = (image(x + 1, y - 1) + 2.0 * image(x + 1, y) + image(x + 1, y + 1)) -
                              (image(x - 1, y - 1) + 2.0 * image(x - 1, y) + image(x - 1, y + 1));
            const double gy = (image(x - 1, y + 1) + 2.0 * image(x, y + 1) + image(x + 1, y + 1)) -
                              (image(x - 1, y - 1) + 2.0 * image(x, y - 1) + image(x + 1, y - 1));
            sum += std::sqrt(gx * gx + gy * gy);
        }
    }
    return sum / static_cast<double>(W * H);
}

} // namespace learnorder
