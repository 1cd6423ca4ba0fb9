#include "rifs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rifs {

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void reject_distinguished_start(const IfsSystem& sys, const SpherePoint& z0) {
    const bool bad = sys.family == Family::critical ? is_exact_special(z0)
                                                    : z0.is_zero();
    if (bad)
        fail(ErrorCode::degenerate_orbit,
             "start point is a distinguished point of the system");
}

struct OccupationObserver {
    double eps;
    long long count = 0;
    void visit(long long, int, const SpherePoint& z) {
        if (z.planar_abs_below(eps)) ++count;
    }
};

} // namespace

OccupationResult occupation_fraction(const IfsSystem& sys, const SpherePoint& z0,
                                     double epsilon, long long n_steps, int trials,
                                     std::uint64_t seed, int threads) {
    if (!(epsilon > 0.0))
        fail(ErrorCode::invalid_parameter, "epsilon must be positive");
    if (n_steps < 1 || trials < 1)
        fail(ErrorCode::invalid_parameter, "need n_steps >= 1 and trials >= 1");
    reject_distinguished_start(sys, z0);

    OccupationResult out;
    out.epsilon = epsilon;
    out.n_steps = n_steps;
    out.fractions.assign(static_cast<size_t>(trials), 0.0);
    out.collapsed_at.assign(static_cast<size_t>(trials), -1);

    for_each_trial(trials, threads, [&](int t) {
        SymbolStream stream(seed, static_cast<std::uint64_t>(t), sys.p0);
        OccupationObserver obs{epsilon};
        const RunResult run = run_orbit(sys, z0, stream, n_steps, false, obs);
        out.fractions[static_cast<size_t>(t)] =
            static_cast<double>(obs.count) / static_cast<double>(n_steps);
        out.collapsed_at[static_cast<size_t>(t)] = run.collapsed_at;
    });

    out.mean = std::accumulate(out.fractions.begin(), out.fractions.end(), 0.0) /
               static_cast<double>(trials);
    out.median = median_of(out.fractions);
    return out;
}

// ---------------------------------------------------------------------------
// sojourn
// ---------------------------------------------------------------------------

SojournBuilder::SojournBuilder(double epsilon, double r_far)
    : eps_(epsilon), r_(r_far) {
    if (!(epsilon < 1.0 && r_far > 1.0))
        fail(ErrorCode::invalid_parameter, "need epsilon < 1 < r");
}

bool SojournBuilder::member(const SpherePoint& z) const {
    return z.planar_abs_below(eps_) || z.planar_abs_above(r_) || z.is_infinity();
}

void SojournBuilder::push(bool in_w) {
    if (!started_) {
        started_ = true;
        starts_in_w_ = in_w;
        current_in_ = in_w;
    } else if (in_w != current_in_) {
        transitions_.push_back(pos_);
        current_in_ = in_w;
    }
    if (in_w) ++raw_in_;
    ++pos_;
}

void SojournBuilder::visit(long long, int, const SpherePoint& z) {
    push(member(z));
}

SojournRecord SojournBuilder::finish() const {
    SojournRecord rec;
    rec.escape_times = transitions_;
    rec.steps = pos_;
    rec.raw_in_count = raw_in_;
    rec.starts_in_w = starts_in_w_;
    rec.single_phase = transitions_.empty();

    // phase i (1-based) runs over [T_{i-1}, T_i); odd phases share the
    // membership of the start
    long long prev = 0;
    for (size_t i = 0; i < transitions_.size(); ++i) {
        const long long len = transitions_[i] - prev;
        const bool in_w = (i % 2 == 0) ? starts_in_w_ : !starts_in_w_;
        (in_w ? rec.eta : rec.xi).push_back(len);
        prev = transitions_[i];
    }
    const long long open_len = pos_ - prev;
    const bool open_in_w =
        (transitions_.size() % 2 == 0) ? starts_in_w_ : !starts_in_w_;
    if (open_in_w)
        rec.eta_tilde = open_len;
    else
        rec.xi_tilde = open_len;
    return rec;
}

SojournRecord sojourn_decomposition(const IfsSystem& sys, const SpherePoint& z0,
                                    double epsilon, double r_far,
                                    long long n_steps, SymbolStream& stream) {
    reject_distinguished_start(sys, z0);
    SojournBuilder builder(epsilon, r_far);
    const RunResult run = run_orbit(sys, z0, stream, n_steps, false, builder);
    SojournRecord rec = builder.finish();
    rec.collapsed_at = run.collapsed_at;
    return rec;
}

SojournRecord sojourn_from_membership(const std::vector<bool>& in_w) {
    SojournBuilder builder(0.5, 2.0);
    for (bool b : in_w) builder.push(b);
    return builder.finish();
}

std::vector<bool> reconstruct_membership(const SojournRecord& rec) {
    std::vector<bool> out;
    out.reserve(static_cast<size_t>(rec.steps));
    size_t ieta = 0, ixi = 0;
    bool in_w = rec.starts_in_w;
    const size_t phases = rec.eta.size() + rec.xi.size();
    for (size_t p = 0; p < phases; ++p) {
        const long long len = in_w ? rec.eta[ieta++] : rec.xi[ixi++];
        out.insert(out.end(), static_cast<size_t>(len), in_w);
        in_w = !in_w;
    }
    const long long open = in_w ? rec.eta_tilde : rec.xi_tilde;
    out.insert(out.end(), static_cast<size_t>(open), in_w);
    return out;
}

long long occupation_identity_residual(const SojournRecord& rec) {
    const long long eta_sum =
        std::accumulate(rec.eta.begin(), rec.eta.end(), 0LL) + rec.eta_tilde;
    const long long xi_sum =
        std::accumulate(rec.xi.begin(), rec.xi.end(), 0LL) + rec.xi_tilde;
    return std::llabs(rec.raw_in_count - eta_sum) +
           std::llabs(rec.steps - (eta_sum + xi_sum));
}

// ---------------------------------------------------------------------------
// Kac return times
// ---------------------------------------------------------------------------

KacResult kac_return_times(const IfsSystem& sys, double s, int samples,
                           long long cap, std::uint64_t seed, int threads) {
    if (!(s > 0.0 && s < 0.5))
        fail(ErrorCode::invalid_parameter, "inner radius s must lie in (0, 0.5)");
    if (samples < 1 || cap < 1)
        fail(ErrorCode::invalid_parameter, "need samples >= 1 and cap >= 1");

    KacResult out;
    out.s = s;
    out.cap = cap;
    out.return_times.assign(static_cast<size_t>(samples), 0.0);
    out.censored.assign(static_cast<size_t>(samples), 0);
    out.collapse_steps.assign(static_cast<size_t>(samples), -1);

    const bool critical = sys.family == Family::critical;
    auto absorbing = [&](const SpherePoint& z) {
        return z.is_zero() || (critical && (z.is_infinity() || z.is_minus_one()));
    };
    auto in_annulus = [&](const SpherePoint& z) {
        return !z.planar_abs_below(s) && z.planar_abs_below(2.0 * s);
    };

    for_each_trial(samples, threads, [&](int t) {
        auto aux = make_rng(seed, static_cast<std::uint64_t>(t), 0xA11);
        const double radius = s * std::sqrt(1.0 + 3.0 * uniform01(aux));
        const double angle = 2.0 * M_PI * uniform01(aux);
        SpherePoint z = SpherePoint::from(std::polar(radius, angle));

        SymbolStream stream(seed, static_cast<std::uint64_t>(t), sys.p0);
        // start conditioned on the cylinder [0]: the first applied map is f0
        z = detail::advance(sys, z, 0, false).next;

        long long result = cap;
        bool censored = true;
        for (long long i = 1; i <= cap; ++i) {
            if (absorbing(z)) {
                out.collapse_steps[static_cast<size_t>(t)] = i;
                break;
            }
            const int sym = stream.next();
            if (sym == 0 && in_annulus(z)) {
                result = i;
                censored = false;
                break;
            }
            z = detail::advance(sys, z, sym, false).next;
        }
        out.return_times[static_cast<size_t>(t)] = static_cast<double>(result);
        out.censored[static_cast<size_t>(t)] = censored ? 1 : 0;
    });

    for (auto c : out.censored) out.censored_count += c;
    return out;
}

// ---------------------------------------------------------------------------
// Hill estimator
// ---------------------------------------------------------------------------

namespace {

double hill_alpha(std::vector<double>& work, int k) {
    std::sort(work.begin(), work.end(), std::greater<double>());
    const double pivot = work[static_cast<size_t>(k)];
    if (!(pivot > 0.0))
        fail(ErrorCode::undefined_tail, "order statistics must be positive");
    double acc = 0.0;
    for (int i = 0; i < k; ++i) acc += std::log(work[static_cast<size_t>(i)] / pivot);
    if (!(acc > 0.0))
        fail(ErrorCode::undefined_tail, "degenerate (constant) tail sample");
    return static_cast<double>(k) / acc;
}

} // namespace

TailEstimate hill_tail_index(const std::vector<double>& samples, int k,
                             int bootstrap_rounds, std::uint64_t seed) {
    const size_t n = samples.size();
    if (k < 10 || static_cast<size_t>(k) >= n / 2)
        fail(ErrorCode::invalid_parameter, "need 10 <= k < samples/2");

    std::vector<double> work(samples);
    TailEstimate est;
    est.sample_count = n;
    est.k = k;
    est.alpha = hill_alpha(work, k);

    std::vector<double> boot;
    boot.reserve(static_cast<size_t>(bootstrap_rounds));
    auto rng = make_rng(seed, 0, 0xB007);
    std::vector<double> resample(n);
    for (int b = 0; b < bootstrap_rounds; ++b) {
        for (size_t i = 0; i < n; ++i)
            resample[i] = samples[static_cast<size_t>(uniform01(rng) * n)];
        try {
            boot.push_back(hill_alpha(resample, k));
        } catch (const Error&) {
            // degenerate resample; skip
        }
    }
    if (boot.empty()) {
        est.ci_low = est.ci_high = est.alpha;
        return est;
    }
    std::sort(boot.begin(), boot.end());
    const size_t lo = static_cast<size_t>(0.05 * (boot.size() - 1));
    const size_t hi = static_cast<size_t>(0.95 * (boot.size() - 1));
    est.ci_low = boot[lo];
    est.ci_high = boot[hi];
    return est;
}

// ---------------------------------------------------------------------------
// histogram / Cesaro measure
// ---------------------------------------------------------------------------

EqualAreaScheme EqualAreaScheme::make(int cells) {
    if (cells < 2)
        fail(ErrorCode::invalid_parameter, "need at least 2 cells");
    int bands = static_cast<int>(std::floor(std::sqrt(cells / 2.0)));
    if (bands < 1) bands = 1;
    while (bands > 1 && cells % bands != 0) --bands;
    return {bands, cells / bands};
}

int EqualAreaScheme::bin(const SpherePoint& z) const {
    const double h = z.stereographic_height();
    int band = static_cast<int>((h + 1.0) * 0.5 * bands);
    if (band >= bands) band = bands - 1;
    if (band < 0) band = 0;
    const double u = z.longitude() / (2.0 * M_PI) + 0.5;
    int lon = static_cast<int>(u * lons);
    if (lon >= lons) lon = lons - 1;
    if (lon < 0) lon = 0;
    return band * lons + lon;
}

namespace {

struct CesaroObserver {
    SphereHistogram hist;
    long long burnin;
    double near2; // squared chordal radius
    long long near_count = 0;
    long long seen = 0;

    void visit(long long n, int, const SpherePoint& z) {
        if (n < burnin) return;
        hist.add(z);
        ++seen;
        const double nn = std::norm(z.num);
        const double nd = std::norm(z.den);
        if (4.0 * nn / (nn + nd) <= near2) ++near_count;
    }
};

} // namespace

CesaroResult empirical_cesaro_measure(const IfsSystem& sys, const SpherePoint& z0,
                                      long long n_steps, long long burnin,
                                      int cells, double near_radius,
                                      SymbolStream& stream) {
    if (n_steps <= burnin)
        fail(ErrorCode::invalid_parameter, "need n_steps > burnin");
    CesaroObserver obs{SphereHistogram(EqualAreaScheme::make(cells)), burnin,
                       near_radius * near_radius};
    const RunResult run = run_orbit(sys, z0, stream, n_steps, false, obs);
    CesaroResult out{std::move(obs.hist), 0.0, near_radius, run.collapsed_at};
    out.mass_near_zero =
        obs.seen ? static_cast<double>(obs.near_count) / static_cast<double>(obs.seen)
                 : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// coverage probe
// ---------------------------------------------------------------------------

CoverageReport coverage_probe(const IfsSystem& sys, const SpherePoint& z0,
                              int depth, int cells, int dedup_factor,
                              long long frontier_budget) {
    if (depth < 0 || cells < 2 || dedup_factor < 1 || frontier_budget < 1)
        fail(ErrorCode::invalid_parameter, "bad coverage probe parameters");
    reject_distinguished_start(sys, z0);

    const EqualAreaScheme scheme = EqualAreaScheme::make(cells);
    EqualAreaScheme dedup{scheme.bands * dedup_factor, scheme.lons * dedup_factor};

    std::vector<char> visited(static_cast<size_t>(scheme.cells()), 0);
    std::vector<char> seen(static_cast<size_t>(dedup.cells()), 0);

    CoverageReport rep;
    rep.cells_total = scheme.cells();

    auto mark = [&](const SpherePoint& z) { visited[static_cast<size_t>(scheme.bin(z))] = 1; };
    auto count_visited = [&]() {
        long long c = 0;
        for (char v : visited) c += v;
        return c;
    };

    std::vector<SpherePoint> frontier{z0};
    mark(z0);
    seen[static_cast<size_t>(dedup.bin(z0))] = 1;
    rep.points_generated = 1;
    rep.visited_by_depth.emplace_back(0, count_visited());

    std::vector<SpherePoint> next;
    for (int d = 1; d <= depth && !frontier.empty(); ++d) {
        next.clear();
        for (const SpherePoint& z : frontier) {
            for (int sym = 0; sym < 2; ++sym) {
                const SpherePoint img = detail::advance(sys, z, sym, false).next;
                ++rep.points_generated;
                mark(img);
                char& cell = seen[static_cast<size_t>(dedup.bin(img))];
                if (!cell) {
                    cell = 1;
                    if (static_cast<long long>(next.size()) < frontier_budget)
                        next.push_back(img);
                    else
                        rep.partial = true;
                }
            }
        }
        frontier.swap(next);
        rep.depth_reached = d;
        rep.visited_by_depth.emplace_back(d, count_visited());
    }

    rep.cells_visited = count_visited();
    rep.fraction = static_cast<double>(rep.cells_visited) /
                   static_cast<double>(rep.cells_total);
    return rep;
}

// ---------------------------------------------------------------------------
// non-normality probe
// ---------------------------------------------------------------------------

namespace {

struct ConjugatedMap {
    TruncatedSeries lo; // order K
    TruncatedSeries hi; // order K + 5, for the truncation cross-check
};

ConjugatedMap build_normalized_g0(Complex lambda, int order) {
    auto build = [&](int K) {
        const IfsSystem sys = make_critical(lambda, 0.5);
        const TruncatedSeries f1 = taylor_at_zero(sys.map1, K);
        const TruncatedSeries psi = koenigs_linearizer(f1);
        const TruncatedSeries chi = invert_series(psi);
        const TruncatedSeries g0 =
            compose(psi, compose(taylor_at_zero(sys.map0, K), chi));
        return rescale(g0, g0.coeff(2));
    };
    return {build(order), build(order + 5)};
}

} // namespace

NonNormalityResult non_normality_probe(Complex lambda, double r, int cycles,
                                       int order) {
    if (lambda == Complex{0.0, 0.0} || lambda.imag() == 0.0 || std::abs(lambda) >= 1.0)
        fail(ErrorCode::invalid_parameter, "lambda must lie in B(0,1) \\ R");
    if (!(r > 0.0 && r <= 0.01))
        fail(ErrorCode::invalid_parameter, "scale r must lie in (0, 0.01]");
    if (cycles < 0 || order < 8)
        fail(ErrorCode::invalid_parameter, "need cycles >= 0 and order >= 8");

    const ConjugatedMap g0 = build_normalized_g0(lambda, order);
    NonNormalityResult out;

    Complex u{r / 6.0, 0.0};
    Complex v{1.0, 0.0};
    auto ratio = [&]() { return std::abs(v) / std::abs(u); };
    out.ratios.push_back(ratio());
    const double r0 = out.ratios.front();

    auto in_cone = [&](Complex w) {
        const double a = std::abs(w);
        return a > 0.0 && a < r / 3.0 && std::abs(std::arg(w)) < 2.0 * M_PI / 5.0;
    };
    auto apply_g0 = [&](Complex w) {
        const Complex lo = g0.lo.evaluate(w);
        const Complex hi = g0.hi.evaluate(w);
        const double dis = std::abs(lo - hi);
        out.max_truncation_disagreement =
            std::max(out.max_truncation_disagreement, dis);
        if (dis > 1e-8)
            fail(ErrorCode::scale_too_large,
                 "truncation orders disagree beyond 1e-8: reduce r");
        return lo;
    };

    for (int c = 0; c < cycles; ++c) {
        long long guard = 0;
        while (!in_cone(u)) {
            u *= lambda;
            v *= lambda;
            out.symbols.push_back(1);
            out.ratios.push_back(ratio());
            if (++guard > 100000)
                fail(ErrorCode::invalid_parameter,
                     "linear phase never entered the cone");
        }
        guard = 0;
        while (in_cone(u)) {
            const double before = ratio();
            v *= g0.lo.evaluate_derivative(u);
            u = apply_g0(u);
            out.symbols.push_back(0);
            out.ratios.push_back(ratio());
            if (ratio() <= before) out.increasing_on_g0_blocks = false;
            if (++guard > 100000)
                fail(ErrorCode::invalid_parameter, "expansion phase never left the cone");
        }
        out.cycles = c + 1;
    }
    out.growth = out.ratios.back() / r0;
    return out;
}

// ---------------------------------------------------------------------------
// unit-circle analyses
// ---------------------------------------------------------------------------

Complex f1_unit_circle_chart(Complex lambda, Complex w) {
    return (lambda * (w - Complex{1.0, 0.0}) + w * w) / (w * w);
}

CurveResult unit_circle_curve(Complex lambda, int samples) {
    if (samples < 360)
        fail(ErrorCode::invalid_parameter, "need at least 360 samples");
    if (lambda == Complex{0.0, 0.0} || lambda == Complex{1.0, 0.0})
        fail(ErrorCode::invalid_parameter, "lambda must lie outside {0, 1}");

    CurveResult out;
    out.samples.reserve(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double theta = 2.0 * M_PI * i / samples;
        const Complex w = i == 0 ? Complex{1.0, 0.0} : std::polar(1.0, theta);
        const Complex val = f1_unit_circle_chart(lambda, w);
        out.samples.push_back({theta, val, std::abs(val)});
    }

    // crossings of the unit circle away from the forced root at w = 1:
    // count sign alternations of |f1(w)| - 1 over theta in (0, 2pi),
    // never pairing across the theta = 0 sample
    int prev_sign = 0;
    for (int i = 1; i < samples; ++i) {
        const double g = out.samples[static_cast<size_t>(i)].abs - 1.0;
        const int s = g > 0.0 ? 1 : (g < 0.0 ? -1 : 0);
        if (s == 0) {
            ++out.crossings; // exact tangency sample counts once
            continue;
        }
        if (prev_sign != 0 && s != prev_sign) ++out.crossings;
        prev_sign = s;
    }
    return out;
}

std::vector<CandidateSetVerdict> invariant_candidate_check(Complex lambda,
                                                           double tol) {
    if (lambda == Complex{0.0, 0.0} || lambda == Complex{1.0, 0.0})
        fail(ErrorCode::invalid_parameter, "lambda must lie outside {0, 1}");

    auto w = [](int p, int q) {
        return std::polar(1.0, 2.0 * M_PI * static_cast<double>(p) / q);
    };
    struct Candidate {
        std::string name;
        std::vector<Complex> elems;
    };
    const std::vector<Candidate> sets = {
        {"{-1}", {w(1, 2)}},
        {"{-i, -1}", {w(3, 4), w(1, 2)}},
        {"{i, -1}", {w(1, 4), w(1, 2)}},
        {"{e(1/3), e(2/3)}", {w(1, 3), w(2, 3)}},
        {"{i, -1, e(1/8)}", {w(1, 4), w(1, 2), w(1, 8)}},
        {"{i, -1, e(7/8)}", {w(1, 4), w(1, 2), w(7, 8)}},
        {"{-1, -i, i}", {w(1, 2), w(3, 4), w(1, 4)}},
        {"{e(1/3), e(2/3), e(1/6)}", {w(1, 3), w(2, 3), w(1, 6)}},
        {"{e(1/3), e(2/3), e(5/6)}", {w(1, 3), w(2, 3), w(5, 6)}},
        {"{e(1/7), e(2/7), e(4/7)}", {w(1, 7), w(2, 7), w(4, 7)}},
        {"{e(3/7), e(6/7), e(5/7)}", {w(3, 7), w(6, 7), w(5, 7)}},
    };

    std::vector<CandidateSetVerdict> out;
    out.reserve(sets.size());
    for (const auto& cand : sets) {
        CandidateSetVerdict v;
        v.name = cand.name;
        v.elements = cand.elems;
        v.invariant = true;
        for (const Complex& e : cand.elems) {
            const Complex img = f1_unit_circle_chart(lambda, e);
            v.images.push_back(img);
            bool inside = std::abs(img) > 1e9; // infinity sentinel
            if (!inside && std::abs(img - Complex{1.0, 0.0}) <= tol) inside = true;
            if (!inside)
                for (const Complex& m : cand.elems)
                    if (std::abs(img - m) <= tol) { inside = true; break; }
            if (!inside) v.invariant = false;
        }
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace rifs
