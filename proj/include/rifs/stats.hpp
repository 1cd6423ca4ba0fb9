#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rifs/engine.hpp"
#include "rifs/series.hpp"

namespace rifs {

// ---------------------------------------------------------------------------
// occupation statistics
// ---------------------------------------------------------------------------

struct OccupationResult {
    double epsilon = 0.0;
    long long n_steps = 0;
    std::vector<double> fractions;        // one per trial
    std::vector<long long> collapsed_at;  // first exact-special hit, -1 if none
    double mean = 0.0;
    double median = 0.0;
};

/// Fraction of steps 0 <= n < N with |z_n| < epsilon, per trial (infinity
/// counts as outside; a point rounded to exact 0 counts as inside).
OccupationResult occupation_fraction(const IfsSystem& sys, const SpherePoint& z0,
                                     double epsilon, long long n_steps, int trials,
                                     std::uint64_t seed, int threads = 1);

// ---------------------------------------------------------------------------
// sojourn decomposition: W = B(0,eps) ∪ {|z| > r} ∪ {inf}
// ---------------------------------------------------------------------------

struct SojournRecord {
    std::vector<long long> escape_times; // T_1, T_2, ... (T_0 = 0 implicit)
    std::vector<long long> eta;          // completed in-W durations
    std::vector<long long> xi;           // completed out-of-W durations
    long long eta_tilde = 0;             // partial counts of the open phase
    long long xi_tilde = 0;
    long long raw_in_count = 0;          // sum of 1_W over all visited points
    long long steps = 0;
    bool starts_in_w = true;
    bool single_phase = false;           // no alternation observed
    long long collapsed_at = -1;
};

/// Streaming phase extractor; usable directly as a run_orbit observer.
class SojournBuilder {
public:
    SojournBuilder(double epsilon, double r_far);

    void visit(long long n, int symbol, const SpherePoint& z);
    void push(bool in_w); // synthetic membership feed
    bool member(const SpherePoint& z) const;
    SojournRecord finish() const;

private:
    double eps_, r_;
    bool started_ = false;
    bool current_in_ = true;
    bool starts_in_w_ = true;
    long long pos_ = 0;
    long long raw_in_ = 0;
    std::vector<long long> transitions_;
};

SojournRecord sojourn_decomposition(const IfsSystem& sys, const SpherePoint& z0,
                                    double epsilon, double r_far,
                                    long long n_steps, SymbolStream& stream);

SojournRecord sojourn_from_membership(const std::vector<bool>& in_w);

/// Rebuild the raw membership sequence from the phase decomposition.
std::vector<bool> reconstruct_membership(const SojournRecord& rec);

/// |raw in-count - (sum eta + eta~)| + |steps - (sum eta + eta~ + sum xi + xi~)|,
/// exactly 0 by the occupation-frequency identity.
long long occupation_identity_residual(const SojournRecord& rec);

// ---------------------------------------------------------------------------
// return times to A = [0] x {s <= |z| < 2s} (Kac experiment)
// ---------------------------------------------------------------------------

struct KacResult {
    double s = 0.0;
    long long cap = 0;
    std::vector<double> return_times;   // cap for censored samples
    std::vector<std::uint8_t> censored; // 1 when the cap was hit
    std::vector<long long> collapse_steps;
    long long censored_count = 0;
};

/// Samples of the return time R to A from starts uniform on the annulus with
/// fresh symbol streams; returns require both z_i in the annulus and next
/// symbol 0. Samples whose orbit collapses onto an exact absorbing point are
/// censored immediately (they can never return) and flagged, not dropped.
KacResult kac_return_times(const IfsSystem& sys, double s, int samples,
                           long long cap, std::uint64_t seed, int threads = 1);

// ---------------------------------------------------------------------------
// Hill tail-index estimation
// ---------------------------------------------------------------------------

struct TailEstimate {
    std::size_t sample_count = 0;
    int k = 0;
    double alpha = 0.0;
    double ci_low = 0.0;  // bootstrap 90% interval
    double ci_high = 0.0;
};

TailEstimate hill_tail_index(const std::vector<double>& samples, int k,
                             int bootstrap_rounds = 200, std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// equal-area sphere histogram
// ---------------------------------------------------------------------------

/// Latitude bands of equal spherical area (uniform splits of the height
/// coordinate) times uniform longitude splits; every bin has the same area.
struct EqualAreaScheme {
    int bands = 1;
    int lons = 1;

    static EqualAreaScheme make(int cells);
    int cells() const { return bands * lons; }
    int bin(const SpherePoint& z) const;
    double height_lo(int band) const { return -1.0 + 2.0 * band / bands; }
    double height_hi(int band) const { return -1.0 + 2.0 * (band + 1) / bands; }
    double lon_lo(int lon) const { return -M_PI + 2.0 * M_PI * lon / lons; }
    double lon_hi(int lon) const { return -M_PI + 2.0 * M_PI * (lon + 1) / lons; }
};

struct SphereHistogram {
    EqualAreaScheme scheme;
    std::vector<long long> counts;
    long long total = 0;

    explicit SphereHistogram(EqualAreaScheme s = {})
        : scheme(s), counts(static_cast<size_t>(s.cells()), 0) {}
    void add(const SpherePoint& z) {
        ++counts[static_cast<size_t>(scheme.bin(z))];
        ++total;
    }
};

struct CesaroResult {
    SphereHistogram hist;
    double mass_near_zero = 0.0; // fraction with chordal distance to 0 <= radius
    double near_radius = 0.0;
    long long collapsed_at = -1;
};

CesaroResult empirical_cesaro_measure(const IfsSystem& sys, const SpherePoint& z0,
                                      long long n_steps, long long burnin,
                                      int cells, double near_radius,
                                      SymbolStream& stream);

// ---------------------------------------------------------------------------
// semigroup-orbit coverage probe
// ---------------------------------------------------------------------------

struct CoverageReport {
    long long cells_total = 0;
    long long cells_visited = 0;
    double fraction = 0.0;
    int depth_reached = 0;
    long long points_generated = 0;
    bool partial = false; // frontier budget exceeded
    std::vector<std::pair<int, long long>> visited_by_depth;
};

/// Breadth-first expansion of word images of z0 up to the given depth, with
/// deduplication on an equal-area grid dedup_factor times finer per axis
/// than the coverage cells.
CoverageReport coverage_probe(const IfsSystem& sys, const SpherePoint& z0,
                              int depth, int cells, int dedup_factor = 1,
                              long long frontier_budget = 2000000);

// ---------------------------------------------------------------------------
// non-normality ratio probe (tangent growth along the cone policy)
// ---------------------------------------------------------------------------

struct NonNormalityResult {
    std::vector<double> ratios;         // R_n, starting with R_0
    std::vector<std::uint8_t> symbols;  // symbol applied at each step
    int cycles = 0;
    double growth = 1.0;                // R_final / R_0
    bool increasing_on_g0_blocks = true;
    double max_truncation_disagreement = 0.0;
};

/// Works in f1-linearizing coordinates rescaled so the conjugated f0 is
/// 2u + u^2 + h.o.t.; g1 is exactly linear there. Runs the word policy
/// "apply g1 until the cone C = {0 < |u| < r/3, |arg u| < 2pi/5} is entered,
/// then g0 until it is left" for the given number of cycles.
NonNormalityResult non_normality_probe(Complex lambda, double r, int cycles,
                                       int order = 20);

// ---------------------------------------------------------------------------
// unit-circle analyses in the w = z + 1 chart
// ---------------------------------------------------------------------------

/// f1 in the w-chart: w -> (lambda (w - 1) + w^2) / w^2.
Complex f1_unit_circle_chart(Complex lambda, Complex w);

struct CurveSample {
    double theta = 0.0;
    Complex value;
    double abs = 0.0;
};

struct CurveResult {
    std::vector<CurveSample> samples;
    int crossings = 0; // sign changes of |f1(w)| - 1, excluding the root at w = 1
};

CurveResult unit_circle_curve(Complex lambda, int samples);

struct CandidateSetVerdict {
    std::string name;
    std::vector<Complex> elements;
    std::vector<Complex> images;
    bool invariant = false;
};

/// The 11 candidate finite subsets of the unit circle closed under w -> w^2
/// (up to adjoining 1); for each, tests whether the f1-image stays inside
/// set ∪ {1, infinity-sentinel} to the given tolerance.
std::vector<CandidateSetVerdict> invariant_candidate_check(Complex lambda,
                                                           double tol = 1e-9);

} // namespace rifs
