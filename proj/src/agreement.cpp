#include "learnorder/agreement.hpp"

#include "learnorder/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace learnorder {

namespace {

void check_epoch(const CorrectnessCube& cube, std::size_t epoch) {
    if (epoch >= cube.num_epochs()) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("epoch position {} outside cube with {} epochs", epoch,
                                cube.num_epochs()));
    }
}

std::vector<std::size_t> hit_counts(const CorrectnessCube& cube, std::size_t epoch) {
    std::vector<std::size_t> hits(cube.num_runs());
    for (std::size_t k = 0; k < cube.num_runs(); ++k) {
        const auto r = cube.row(k, epoch);
        hits[k] = static_cast<std::size_t>(std::count(r.begin(), r.end(), 1));
    }
    return hits;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd population_mean_std(std::span<const double> values) {
    if (values.empty()) return {};
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / n)};
}

} // namespace

std::optional<double> true_positive_agreement(const CorrectnessCube& cube, std::size_t epoch) {
    check_epoch(cube, epoch);
    std::size_t all = 0, any = 0;
    for (std::size_t n = 0; n < cube.num_instances(); ++n) {
        bool every = true, some = false;
        for (std::size_t k = 0; k < cube.num_runs(); ++k) {
            const bool c = cube.at(k, epoch, n);
            every = every && c;
            some = some || c;
        }
        all += every;
        any += some;
    }
    if (any == 0) return std::nullopt;
    return static_cast<double>(all) / static_cast<double>(any);
}

double lower_bound(const CorrectnessCube& cube, std::size_t epoch) {
    check_epoch(cube, epoch);
    // Errors are summed as integer counts so that e.g. K=3 at accuracy 2/3
    // lands exactly on zero.
    const auto hits = hit_counts(cube, epoch);
    const std::size_t N = cube.num_instances();
    std::size_t missed = 0;
    for (std::size_t h : hits) missed += N - h;
    if (missed >= N) return 0.0;
    return static_cast<double>(N - missed) / static_cast<double>(N);
}

double expected_random_agreement(const CorrectnessCube& cube, std::size_t epoch) {
    check_epoch(cube, epoch);
    // prod(hits) / N^K as one quotient: exact whenever both fit in 53 bits.
    const auto hits = hit_counts(cube, epoch);
    const double N = static_cast<double>(cube.num_instances());
    double num = 1.0, den = 1.0;
    for (std::size_t h : hits) {
        num *= static_cast<double>(h);
        den *= N;
    }
    return num / den;
}

double pabak(const CorrectnessCube& cube, std::size_t epoch) {
    check_epoch(cube, epoch);
    const std::size_t K = cube.num_runs();
    const std::size_t N = cube.num_instances();
    // sum over pairs of (2 * matches - N), divided once by N * pairs
    std::int64_t total = 0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < K; ++i) {
        const auto a = cube.row(i, epoch);
        for (std::size_t j = i + 1; j < K; ++j) {
            const auto b = cube.row(j, epoch);
            std::int64_t same = 0;
            for (std::size_t n = 0; n < N; ++n) same += (a[n] == b[n]);
            total += 2 * same - static_cast<std::int64_t>(N);
            ++pairs;
        }
    }
    return static_cast<double>(total) / (static_cast<double>(N) * static_cast<double>(pairs));
}

AccuracyStats accuracy_stats(const CorrectnessCube& cube, std::size_t epoch) {
    check_epoch(cube, epoch);
    std::vector<double> acc(cube.num_runs());
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] = cube.accuracy(k, epoch);
    const auto s = population_mean_std(acc);
    return {s.mean, s.std};
}

AgreementSeries agreement_series(const CorrectnessCube& cube) {
    AgreementSeries s;
    s.epochs = cube.epochs();
    const std::size_t T = cube.num_epochs();
    s.tpa.resize(T);
    s.lower_bound.resize(T);
    s.expected_random.resize(T);
    s.pabak.resize(T);
    s.accuracy_mean.resize(T);
    s.accuracy_std.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        s.tpa[t] = true_positive_agreement(cube, t);
        s.lower_bound[t] = lower_bound(cube, t);
        s.expected_random[t] = expected_random_agreement(cube, t);
        s.pabak[t] = pabak(cube, t);
        const auto acc = accuracy_stats(cube, t);
        s.accuracy_mean[t] = acc.mean;
        s.accuracy_std[t] = acc.std;
    }
    return s;
}

std::vector<bool> agreed_mask(const CorrectnessCube& cube, std::size_t epoch) {
    check_epoch(cube, epoch);
    std::vector<bool> mask(cube.num_instances(), true);
    for (std::size_t k = 0; k < cube.num_runs(); ++k) {
        const auto r = cube.row(k, epoch);
        for (std::size_t n = 0; n < r.size(); ++n) {
            if (!r[n]) mask[n] = false;
        }
    }
    return mask;
}

namespace {

template <typename Lookup>
CategoricalLearnedSeries learned_fraction(const CorrectnessCube& cube,
                                          const std::string& category_name, Lookup&& lookup) {
    std::vector<std::string> value_of(cube.num_instances());
    CategoricalLearnedSeries out;
    out.category_name = category_name;
    out.epochs = cube.epochs();
    for (std::size_t n = 0; n < cube.num_instances(); ++n) {
        const std::string* value = lookup(cube.instances()[n]);
        if (!value) {
            throw Error(ErrorCode::MissingCategory,
                        fmt::format("instance '{}' has no value for category '{}'",
                                    cube.instances()[n], category_name));
        }
        value_of[n] = *value;
        ++out.totals[*value];
    }
    for (const auto& [value, total] : out.totals) {
        out.fractions[value].assign(cube.num_epochs(), 0.0);
    }
    for (std::size_t t = 0; t < cube.num_epochs(); ++t) {
        const auto mask = agreed_mask(cube, t);
        std::map<std::string, std::size_t> agreed;
        for (std::size_t n = 0; n < mask.size(); ++n) {
            if (mask[n]) ++agreed[value_of[n]];
        }
        for (const auto& [value, count] : agreed) {
            out.fractions[value][t] =
                static_cast<double>(count) / static_cast<double>(out.totals[value]);
        }
    }
    return out;
}

} // namespace

CategoricalLearnedSeries categorical_learned_fraction(const CorrectnessCube& cube,
                                                      const InstanceCatalog& catalog,
                                                      const std::string& category_name) {
    return learned_fraction(cube, category_name, [&](const std::string& id) -> const std::string* {
        const auto* entry = catalog.find(id);
        if (!entry) return nullptr;
        auto it = entry->categories.find(category_name);
        return it == entry->categories.end() ? nullptr : &it->second;
    });
}

CategoricalLearnedSeries categorical_learned_fraction(
    const CorrectnessCube& cube, const std::map<std::string, std::string, std::less<>>& values,
    const std::string& category_name) {
    return learned_fraction(cube, category_name, [&](const std::string& id) -> const std::string* {
        auto it = values.find(id);
        return it == values.end() ? nullptr : &it->second;
    });
}

GroupAgreementStats agreement_std_over_groups(std::span<const CorrectnessCube> cubes,
                                              std::size_t group_size) {
    if (cubes.size() < 2) {
        throw Error(ErrorCode::TooFewRuns,
                    fmt::format("need at least 2 run groups, got {}", cubes.size()));
    }
    const auto& ref = cubes.front();
    for (std::size_t g = 0; g < cubes.size(); ++g) {
        const auto& c = cubes[g];
        if (c.epochs() != ref.epochs() || c.instances() != ref.instances()) {
            throw Error(ErrorCode::RaggedLogs,
                        fmt::format("group {} covers different epochs or instances", g));
        }
        if (c.num_runs() != group_size) {
            throw Error(ErrorCode::RaggedLogs,
                        fmt::format("group {} has {} runs, expected {}", g, c.num_runs(),
                                    group_size));
        }
    }

    GroupAgreementStats out;
    out.epochs = ref.epochs();
    const std::size_t T = ref.num_epochs();
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<double> tpa, lb, era;
        for (const auto& c : cubes) {
            if (auto v = true_positive_agreement(c, t)) tpa.push_back(*v);
            lb.push_back(lower_bound(c, t));
            era.push_back(expected_random_agreement(c, t));
        }
        out.tpa_defined.push_back(tpa.size());
        if (tpa.empty()) {
            out.tpa_mean.emplace_back();
            out.tpa_std.emplace_back();
        } else {
            const auto s = population_mean_std(tpa);
            out.tpa_mean.emplace_back(s.mean);
            out.tpa_std.emplace_back(s.std);
        }
        const auto l = population_mean_std(lb);
        out.lb_mean.push_back(l.mean);
        out.lb_std.push_back(l.std);
        const auto e = population_mean_std(era);
        out.era_mean.push_back(e.mean);
        out.era_std.push_back(e.std);
    }
    return out;
}

std::vector<CorrectnessCube> split_into_groups(const CorrectnessCube& cube,
                                               std::size_t group_size) {
    if (group_size < 2 || cube.num_runs() % group_size != 0) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("{} runs cannot be split into groups of {}", cube.num_runs(),
                                group_size));
    }
    std::vector<CorrectnessCube> groups;
    for (std::size_t start = 0; start < cube.num_runs(); start += group_size) {
        std::vector<std::size_t> positions(group_size);
        std::iota(positions.begin(), positions.end(), start);
        groups.push_back(cube.select_runs(positions));
    }
    return groups;
}

} // namespace learnorder
