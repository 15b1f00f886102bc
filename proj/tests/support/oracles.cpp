#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace oracle {

EpochBits epoch_bits(const learnorder::CorrectnessCube& cube, std::size_t epoch) {
    EpochBits bits(cube.num_runs(), std::vector<bool>(cube.num_instances()));
    for (std::size_t k = 0; k < cube.num_runs(); ++k) {
        for (std::size_t n = 0; n < cube.num_instances(); ++n) {
            bits[k][n] = cube.at(k, epoch, n);
        }
    }
    return bits;
}

namespace {

std::set<std::size_t> correct_set(const std::vector<bool>& row) {
    std::set<std::size_t> s;
    for (std::size_t n = 0; n < row.size(); ++n) {
        if (row[n]) s.insert(n);
    }
    return s;
}

} // namespace

std::optional<double> tpa(const EpochBits& bits) {
    std::set<std::size_t> all = correct_set(bits[0]);
    std::set<std::size_t> any = all;
    for (std::size_t k = 1; k < bits.size(); ++k) {
        const auto s = correct_set(bits[k]);
        std::set<std::size_t> inter;
        std::set_intersection(all.begin(), all.end(), s.begin(), s.end(),
                              std::inserter(inter, inter.begin()));
        all = inter;
        any.insert(s.begin(), s.end());
    }
    if (any.empty()) return std::nullopt;
    return static_cast<double>(all.size()) / static_cast<double>(any.size());
}

double lower_bound(const EpochBits& bits) {
    // 1 - min(sum_k |wrong_k| / N, 1) = max(N - sum_k |wrong_k|, 0) / N
    const auto N = static_cast<std::int64_t>(bits[0].size());
    std::int64_t wrong = 0;
    for (const auto& row : bits) {
        wrong += N - static_cast<std::int64_t>(correct_set(row).size());
    }
    return static_cast<double>(std::max<std::int64_t>(N - wrong, 0)) / static_cast<double>(N);
}

double expected_random(const EpochBits& bits) {
    unsigned __int128 num = 1, den = 1;
    for (const auto& row : bits) {
        num *= correct_set(row).size();
        den *= row.size();
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

double pabak(const EpochBits& bits) {
    // mean over unordered pairs of 2 * Po - 1, as one quotient
    const auto N = static_cast<std::int64_t>(bits[0].size());
    std::int64_t num = 0, pairs = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        for (std::size_t j = i + 1; j < bits.size(); ++j) {
            const auto a = correct_set(bits[i]);
            const auto b = correct_set(bits[j]);
            std::set<std::size_t> both, either;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                                  std::inserter(both, both.begin()));
            std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                           std::inserter(either, either.begin()));
            const auto agree = static_cast<std::int64_t>(both.size()) +
                               (N - static_cast<std::int64_t>(either.size()));
            num += 2 * agree - N;
            ++pairs;
        }
    }
    return static_cast<double>(num) / static_cast<double>(N * pairs);
}

learnorder::CorrectnessCube random_cube(std::mt19937_64& rng, std::size_t runs,
                                        std::size_t epochs, std::size_t instances,
                                        double density) {
    std::vector<std::string> run_ids, instance_ids;
    for (std::size_t k = 0; k < runs; ++k) run_ids.push_back("run" + std::to_string(k));
    for (std::size_t n = 0; n < instances; ++n) {
        std::string id = std::to_string(n);
        instance_ids.push_back(std::string(6 - id.size(), '0') + id);
    }
    std::vector<std::int64_t> epoch_ids(epochs);
    std::iota(epoch_ids.begin(), epoch_ids.end(), 0);
    std::bernoulli_distribution coin(density);
    std::vector<std::uint8_t> bits(runs * epochs * instances);
    for (auto& b : bits) b = coin(rng) ? 1 : 0;
    return {run_ids, epoch_ids, instance_ids, bits};
}

double mean_local_entropy(const std::vector<double>& px, std::size_t w, std::size_t h,
                          std::size_t window) {
    double sum = 0.0;
    std::size_t positions = 0;
    for (std::size_t y0 = 0; y0 + window <= h; ++y0) {
        for (std::size_t x0 = 0; x0 + window <= w; ++x0) {
            std::map<int, int> counts;
            for (std::size_t y = y0; y < y0 + window; ++y) {
                for (std::size_t x = x0; x < x0 + window; ++x) {
                    int bin = static_cast<int>(std::floor(px[y * w + x] + 0.5));
                    bin = std::clamp(bin, 0, 255);
                    ++counts[bin];
                }
            }
            const double total = static_cast<double>(window * window);
            double e = 0.0;
            for (const auto& [bin, c] : counts) {
                const double p = c / total;
                e -= p * std::log2(p);
            }
            sum += e;
            ++positions;
        }
    }
    return sum / static_cast<double>(positions);
}

std::vector<double> gaussian_blur(const std::vector<double>& px, std::size_t w, std::size_t h,
                                  double sigma) {
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    auto reflect = [](int i, int n) {
        // ... 2 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
        while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - 1 - i;
        return i;
    };
    double norm = 0.0;
    for (int i = -r; i <= r; ++i) norm += std::exp(-(i * i) / (2.0 * sigma * sigma));
    std::vector<double> out(w * h, 0.0);
    for (int y = 0; y < static_cast<int>(h); ++y) {
        for (int x = 0; x < static_cast<int>(w); ++x) {
            double acc = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const double g = std::exp(-(dx * dx) / (2.0 * sigma * sigma)) *
                                     std::exp(-(dy * dy) / (2.0 * sigma * sigma)) /
                                     (norm * norm);
                    const int sx = reflect(x + dx, static_cast<int>(w));
                    const int sy = reflect(y + dy, static_cast<int>(h));
                    acc += g * px[static_cast<std::size_t>(sy) * w + static_cast<std::size_t>(sx)];
                }
            }
            out[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x)] = acc;
        }
    }
    return out;
}

std::size_t segment_count(const std::vector<std::vector<double>>& channels, std::size_t w,
                          std::size_t h, double k, std::size_t min_size) {
    struct Edge {
        std::size_t a, b;
        double weight;
    };
    const int offsets[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
    std::vector<Edge> edges;
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            for (const auto& o : offsets) {
                const long nx = static_cast<long>(x) + o[0];
                const long ny = static_cast<long>(y) + o[1];
                if (nx < 0 || ny < 0 || nx >= static_cast<long>(w) || ny >= static_cast<long>(h)) {
                    continue;
                }
                const std::size_t a = y * w + x;
                const std::size_t b = static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx);
                double ss = 0.0;
                for (const auto& c : channels) ss += (c[a] - c[b]) * (c[a] - c[b]);
                edges.push_back({a, b, std::sqrt(ss)});
            }
        }
    }
    std::stable_sort(edges.begin(), edges.end(),
                     [](const Edge& l, const Edge& r) { return l.weight < r.weight; });

    const std::size_t V = w * h;
    std::vector<std::size_t> label(V);
    std::iota(label.begin(), label.end(), 0);
    std::vector<double> internal(V, 0.0); // indexed by label
    auto size_of = [&](std::size_t l) {
        return static_cast<std::size_t>(std::count(label.begin(), label.end(), l));
    };
    auto relabel = [&](std::size_t from, std::size_t to) {
        for (auto& l : label) {
            if (l == from) l = to;
        }
    };

    for (const auto& e : edges) {
        const std::size_t la = label[e.a], lb = label[e.b];
        if (la == lb) continue;
        const double ta = internal[la] + k / static_cast<double>(size_of(la));
        const double tb = internal[lb] + k / static_cast<double>(size_of(lb));
        if (e.weight <= std::min(ta, tb)) {
            internal[la] = std::max({internal[la], internal[lb], e.weight});
            relabel(lb, la);
        }
    }
    for (const auto& e : edges) {
        const std::size_t la = label[e.a], lb = label[e.b];
        if (la != lb && (size_of(la) < min_size || size_of(lb) < min_size)) relabel(lb, la);
    }
    return std::set<std::size_t>(label.begin(), label.end()).size();
}

std::vector<double> dct2(const std::vector<double>& px, std::size_t w, std::size_t h) {
    const double pi = 3.14159265358979323846;
    std::vector<double> out(w * h);
    for (std::size_t v = 0; v < h; ++v) {
        for (std::size_t u = 0; u < w; ++u) {
            const double au = u == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w);
            const double av = v == 0 ? std::sqrt(1.0 / h) : std::sqrt(2.0 / h);
            double acc = 0.0;
            for (std::size_t y = 0; y < h; ++y) {
                for (std::size_t x = 0; x < w; ++x) {
                    acc += px[y * w + x] * std::cos(pi * (2.0 * x + 1.0) * u / (2.0 * w)) *
                           std::cos(pi * (2.0 * y + 1.0) * v / (2.0 * h));
                }
            }
            out[v * w + u] = au * av * acc;
        }
    }
    return out;
}

double sobel(const std::vector<double>& px, std::size_t w, std::size_t h) {
    const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    double sum = 0.0;
    for (std::size_t y = 1; y + 1 < h; ++y) {
        for (std::size_t x = 1; x + 1 < w; ++x) {
            double gx = 0.0, gy = 0.0;
            for (int j = 0; j < 3; ++j) {
                for (int i = 0; i < 3; ++i) {
                    const double v = px[(y + j - 1) * w + (x + i - 1)];
                    gx += kx[j][i] * v;
                    gy += ky[j][i] * v;
                }
            }
            sum += std::hypot(gx, gy);
        }
    }
    return sum / static_cast<double>(w * h);
}

double pearson_p_value(double r, std::size_t n) {
    const double dof = static_cast<double>(n) - 2.0;
    const double t = std::abs(r) * std::sqrt(dof / (1.0 - r * r));
    const double log_c = std::lgamma((dof + 1.0) / 2.0) - std::lgamma(dof / 2.0) -
                         0.5 * std::log(dof * 3.14159265358979323846);
    auto density = [&](double x) {
        return std::exp(log_c - (dof + 1.0) / 2.0 * std::log1p(x * x / dof));
    };
    const int steps = 200000; // even
    const double step = t / steps;
    double s = density(0.0) + density(t);
    for (int i = 1; i < steps; ++i) s += density(i * step) * (i % 2 ? 4.0 : 2.0);
    const double central = s * step / 3.0; // P(0 <= T <= t)
    return 1.0 - 2.0 * central;
}

std::vector<std::size_t> histogram_counts(const std::vector<double>& values, std::size_t bins) {
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    std::vector<std::size_t> counts(bins, 0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : values) {
        // the last bin is closed on the right
        std::size_t chosen = bins - 1;
        for (std::size_t b = 0; b + 1 < bins; ++b) {
            if (v < lo + static_cast<double>(b + 1) * width) {
                chosen = b;
                break;
            }
        }
        ++counts[chosen];
    }
    return counts;
}

} // namespace oracle
