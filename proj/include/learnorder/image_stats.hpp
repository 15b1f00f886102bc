#pragma once

#include "learnorder/image.hpp"

#include <cstdint>
#include <vector>

namespace learnorder {

// Mean Shannon entropy (bits) of the 256-bin intensity histogram over every
// `window` x `window` position fully inside the image, stride 1. Intensities
// are binned by rounding half-up and clamped to [0,255].
// Throws WindowTooLarge when window > min(width, height), InvalidArgument
// for window 0.
double mean_local_entropy(const GrayImage& image, std::size_t window = 10);

struct SegmentationParams {
    double sigma = 0.5;         // Gaussian pre-smoothing std; <= 0 disables smoothing
    double scale_k = 500.0;     // larger values prefer larger components
    std::size_t min_size = 50;  // components below this size are merged away
};

// Separable Gaussian blur, kernel radius ceil(3 sigma), normalised to unit
// sum, boundaries reflected with the edge pixel repeated.
GrayImage gaussian_smooth(const GrayImage& image, double sigma);

struct GridEdge {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double weight = 0.0;
};

// 8-connected grid graph over the (already smoothed) channels. Edges are
// emitted per pixel in raster order as right, down, down-right, up-right
// neighbours; weight is the Euclidean distance across channels.
std::vector<GridEdge> grid_edges(const std::vector<GrayImage>& channels);

struct Segmentation {
    std::vector<std::uint32_t> labels; // per pixel, dense 0..count-1 in raster first-seen order
    std::size_t count = 0;
};

// Graph-based segmentation (Felzenszwalb-Huttenlocher). Edges are visited in
// ascending weight, ties in emission order. Components merge when the edge
// weight does not exceed min(Int(C1) + k/|C1|, Int(C2) + k/|C2|); a final
// pass over the same order absorbs components smaller than min_size.
Segmentation segment(const std::vector<GrayImage>& channels, const SegmentationParams& params);

// Colour segmentation on the three RGB channels.
std::size_t segment_count(const RgbImage& image, const SegmentationParams& params = {});
std::size_t segment_count(const GrayImage& image, const SegmentationParams& params = {});

// Orthonormal 2-D DCT-II. Result is row-major height x width: entry
// (v, u) holds vertical frequency v and horizontal frequency u.
std::vector<double> dct2(const GrayImage& image);

struct DctEnergy {
    double fraction = 0.0;        // coefficients / (width * height), in (0, 1]
    std::size_t coefficients = 0; // smallest c reaching the energy target
    bool degenerate = false;      // all-zero image: no energy to capture
};

// Smallest share of DCT coefficients, taken by descending magnitude (ties by
// index), whose L2 norm reaches energy_fraction times the norm of all
// coefficients. An all-zero image yields 1/(W*H) with `degenerate` set.
DctEnergy dct_energy_percentage(const GrayImage& image, double energy_fraction = 0.9998);

// Sum of Sobel gradient magnitudes over interior pixels, divided by the
// total pixel count. Stands in for a learned boundary detector as an
// "amount of edges" measure; reported as edge_strength_sobel.
// Throws ImageTooSmall below 3x3.
double edge_strength_sum(const GrayImage& image);

} // namespace learnorder
