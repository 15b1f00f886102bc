#pragma once

#include "learnorder/run_ledger.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace learnorder {

// All values are fractions in [0,1] (PABAK in [-1,1]); rendering in percent
// happens at the output layer.

// |{n : every run correct}| / |{n : any run correct}| at epoch position
// `epoch`. std::nullopt when no run classifies any instance correctly.
std::optional<double> true_positive_agreement(const CorrectnessCube& cube, std::size_t epoch);

// 1 - min(sum_k (1 - acc_k), 1).
double lower_bound(const CorrectnessCube& cube, std::size_t epoch);

// prod_k acc_k: agreement expected if runs classified independently.
double expected_random_agreement(const CorrectnessCube& cube, std::size_t epoch);

// Prevalence- and bias-adjusted kappa on the correct/incorrect dichotomy,
// 2*Po - 1, averaged over all unordered run pairs.
double pabak(const CorrectnessCube& cube, std::size_t epoch);

struct AccuracyStats {
    double mean = 0.0;
    double std = 0.0; // population (divisor K)
};

AccuracyStats accuracy_stats(const CorrectnessCube& cube, std::size_t epoch);

struct AgreementSeries {
    std::vector<std::int64_t> epochs;
    std::vector<std::optional<double>> tpa;
    std::vector<double> lower_bound;
    std::vector<double> expected_random;
    std::vector<double> pabak;
    std::vector<double> accuracy_mean;
    std::vector<double> accuracy_std;

    std::size_t size() const noexcept { return epochs.size(); }
};

AgreementSeries agreement_series(const CorrectnessCube& cube);

// Instances every run classifies correctly at epoch position `epoch`.
std::vector<bool> agreed_mask(const CorrectnessCube& cube, std::size_t epoch);

struct CategoricalLearnedSeries {
    std::string category_name;
    std::vector<std::int64_t> epochs;
    // category value -> per-epoch fraction of that value's instances in the agreed set
    std::map<std::string, std::vector<double>> fractions;
    std::map<std::string, std::size_t> totals;
};

// Throws Error(MissingCategory) when a cube instance has no value for
// `category_name` (or no catalog entry at all).
CategoricalLearnedSeries categorical_learned_fraction(const CorrectnessCube& cube,
                                                      const InstanceCatalog& catalog,
                                                      const std::string& category_name);

// Same, with category values given directly per instance id.
CategoricalLearnedSeries categorical_learned_fraction(
    const CorrectnessCube& cube, const std::map<std::string, std::string, std::less<>>& values,
    const std::string& category_name);

struct GroupAgreementStats {
    std::vector<std::int64_t> epochs;
    // TPa statistics skip cubes whose TPa is undefined at that epoch;
    // nullopt when it is undefined in every cube.
    std::vector<std::optional<double>> tpa_mean, tpa_std;
    std::vector<std::size_t> tpa_defined; // how many cubes contributed
    std::vector<double> lb_mean, lb_std;
    std::vector<double> era_mean, era_std;
};

// Mean and population std of TPa, lower bound and expected random agreement
// across independent groups of `group_size` runs each.
// Throws RaggedLogs on mismatched epochs/instances or group sizes,
// TooFewRuns when fewer than two cubes are given.
GroupAgreementStats agreement_std_over_groups(std::span<const CorrectnessCube> cubes,
                                              std::size_t group_size);

// Splits one cube into consecutive groups of `group_size` runs (canonical
// run order). Throws InvalidArgument when K is not a multiple of group_size.
std::vector<CorrectnessCube> split_into_groups(const CorrectnessCube& cube, std::size_t group_size);

} // namespace learnorder
