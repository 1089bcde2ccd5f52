#pragma once
// Random-flight Monte Carlo in integer dimension d.
//
// Each history starts at the origin, flies a free path drawn from the model,
// collides, scatters isotropically and repeats. Survival weighting replaces
// absorption: the nth collision deposits c^{n-1} and the segment leaving it
// carries flux weight c^n, so one run serves every order and the total. The
// scalar flux is scored by exact chord lengths through spherical shells.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "glbe/analytic.hpp"
#include "glbe/errors.hpp"
#include "glbe/freepath.hpp"
#include "glbe/rng.hpp"

namespace glbe {

inline constexpr int mc_max_dimension = 16;
inline constexpr std::array<int, 4> mc_moment_orders = {0, 2, 4, 6};

struct McConfig {
    TransportProblem problem;
    std::uint64_t histories = 100000;
    std::vector<double> shell_edges;  // empty: moments only
    int n_max = 10;
    double tail_epsilon = 1e-9;
    std::uint64_t master_seed = 1;
    unsigned workers = 1;

    void validate() const {
        const double d = problem.d();
        if (d != std::floor(d) || d > mc_max_dimension) {
            throw DomainError("Monte Carlo needs an integer dimension between 1 and " + std::to_string(mc_max_dimension));
        }
        if (histories < 1) throw DomainError("histories must be at least 1");
        if (n_max < 1) throw DomainError("n_max must be at least 1");
        if (!(tail_epsilon > 0.0 && tail_epsilon < 1.0)) throw DomainError("tail_epsilon must lie in (0, 1)");
        if (workers < 1) throw DomainError("workers must be at least 1");
        if (!shell_edges.empty()) {
            if (shell_edges.front() != 0.0) throw DomainError("shell_edges must start at 0");
            if (shell_edges.size() < 2) throw DomainError("shell_edges needs at least two edges");
            for (std::size_t i = 1; i < shell_edges.size(); ++i) {
                if (!(shell_edges[i] > shell_edges[i - 1]) || !std::isfinite(shell_edges[i])) {
                    throw DomainError("shell_edges must be finite and strictly increasing");
                }
            }
        }
    }
};

// Equal-width shells on [0, r_max].
inline std::vector<double> uniform_shells(double r_max, int count) {
    if (!(r_max > 0.0) || count < 1) throw DomainError("uniform_shells: need r_max > 0 and count >= 1");
    std::vector<double> edges(count + 1);
    for (int i = 0; i <= count; ++i) edges[i] = r_max * i / count;
    return edges;
}

// Volume of the shell [r0, r1] in d dimensions, int Omega_d(r) dr.
inline double shell_volume(double d, double r0, double r1) {
    const double unit_ball = std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
    return unit_ball * (std::pow(r1, d) - std::pow(r0, d));
}

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;

    double z_score(double expected) const {
        return std_error > 0.0 ? (value - expected) / std_error : (value == expected ? 0.0 : INFINITY);
    }
};

// Sums of per-history scores and their squares, laid out as
// [quantity][bin][slot], where bins are orders 0..n_max, then the aggregate of
// orders beyond n_max, then the total; slots are shells, an overflow shell and
// the four moments.
class TallySet {
public:
    TallySet(double d, std::vector<double> edges, int n_max)
        : d_(d), edges_(std::move(edges)), n_max_(n_max), sum_(slots_total(), 0.0), sumsq_(slots_total(), 0.0) {}

    double d() const { return d_; }
    const std::vector<double>& shell_edges() const { return edges_; }
    int n_max() const { return n_max_; }
    std::uint64_t histories_run() const { return histories_; }
    int shells() const { return edges_.empty() ? 0 : static_cast<int>(edges_.size()) - 1; }

    int bins() const { return n_max_ + 3; }
    int aggregate_bin() const { return n_max_ + 1; }
    int total_bin() const { return n_max_ + 2; }
    int slots_per_bin() const { return shells() + 1 + static_cast<int>(mc_moment_orders.size()); }
    int overflow_slot() const { return shells(); }
    int moment_slot(int m) const {
        for (std::size_t i = 0; i < mc_moment_orders.size(); ++i) {
            if (mc_moment_orders[i] == m) return shells() + 1 + static_cast<int>(i);
        }
        throw DomainError("moment order must be one of 0, 2, 4, 6");
    }
    std::size_t index(Quantity q, int bin, int slot) const {
        return (static_cast<std::size_t>(q == Quantity::flux) * bins() + bin) * slots_per_bin() + slot;
    }
    std::size_t slots_total() const { return 2u * bins() * slots_per_bin(); }

    // Bin holding collision order n (or flux order n).
    int bin_of(int n) const { return n <= n_max_ ? n : aggregate_bin(); }

    void add_history_scores(std::span<const std::size_t> touched, std::span<double> scratch) {
        for (std::size_t i : touched) {
            const double v = scratch[i];
            if (v == 0.0) continue;
            sum_[i] += v;
            sumsq_[i] += v * v;
            scratch[i] = 0.0;
        }
        ++histories_;
    }

    // Accumulate another tally with the same layout.
    void merge(const TallySet& other) {
        if (other.edges_ != edges_ || other.n_max_ != n_max_ || other.d_ != d_) {
            throw DomainError("merge: tallies have different layouts");
        }
        for (std::size_t i = 0; i < sum_.size(); ++i) {
            sum_[i] += other.sum_[i];
            sumsq_[i] += other.sumsq_[i];
        }
        histories_ += other.histories_;
    }

    // Mean per history and the standard error of that mean.
    Estimate slot_estimate(std::size_t i) const {
        if (histories_ == 0) throw StateError("tallies are empty: run the simulation first");
        const double n = static_cast<double>(histories_);
        const double mean = sum_[i] / n;
        double var = 0.0;
        if (histories_ > 1) var = std::max(0.0, (sumsq_[i] / n - mean * mean) / (n - 1.0));
        return {mean, std::sqrt(var)};
    }

    const std::vector<double>& sums() const { return sum_; }
    const std::vector<double>& sums_of_squares() const { return sumsq_; }

    // Rebuild from serialized sums (used by the flat-file reader).
    void restore(std::vector<double> sums, std::vector<double> sumsq, std::uint64_t histories) {
        if (sums.size() != sum_.size() || sumsq.size() != sumsq_.size()) throw DomainError("restore: size mismatch");
        sum_ = std::move(sums);
        sumsq_ = std::move(sumsq);
        histories_ = histories;
    }

    bool operator==(const TallySet&) const = default;

private:
    double d_;
    std::vector<double> edges_;
    int n_max_;
    std::vector<double> sum_, sumsq_;
    std::uint64_t histories_ = 0;
};

namespace mc_detail {

using Vec = std::array<double, mc_max_dimension>;

template <class Urbg>
void sample_direction_into(int d, Urbg& rng, std::span<double> out) {
    switch (d) {
        case 1: out[0] = (rng() >> 63) ? 1.0 : -1.0; return;
        case 2: {
            const double phi = 2.0 * std::numbers::pi * uniform_open01(rng);
            out[0] = std::cos(phi);
            out[1] = std::sin(phi);
            return;
        }
        case 3: {
            const double mu = 2.0 * uniform_open01(rng) - 1.0;
            const double phi = 2.0 * std::numbers::pi * uniform_open01(rng);
            const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            out[0] = s * std::cos(phi);
            out[1] = s * std::sin(phi);
            out[2] = mu;
            return;
        }
        default: {
            std::normal_distribution<double> normal;
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (int i = 0; i < d; ++i) {
                    out[i] = normal(rng);
                    norm2 += out[i] * out[i];
                }
            } while (norm2 == 0.0);
            const double inv = 1.0 / std::sqrt(norm2);
            for (int i = 0; i < d; ++i) out[i] *= inv;
        }
    }
}

// Length of {t in [0, s] : t^2 + 2 b t + a <= R^2}.
inline double chord_inside(double a, double b, double s, double radius) {
    const double disc = b * b - a + radius * radius;
    if (disc <= 0.0) return 0.0;
    const double root = std::sqrt(disc);
    const double lo = std::max(0.0, -b - root), hi = std::min(s, -b + root);
    return hi > lo ? hi - lo : 0.0;
}

// int_0^s (t^2 + 2 b t + a)^{m/2} dt for m = 0, 2, 4, 6.
inline std::array<double, 4> segment_moments(double a, double b, double s) {
    const double b2 = 2.0 * b;
    // p, p^2 and p^3 as polynomials in t.
    const std::array<double, 3> p1 = {a, b2, 1.0};
    const std::array<double, 5> p2 = {a * a, 2.0 * a * b2, b2 * b2 + 2.0 * a, 2.0 * b2, 1.0};
    std::array<double, 7> p3{};
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 3; ++j) p3[i + j] += p2[i] * p1[j];
    }
    auto integrate = [s](const auto& poly) {
        double acc = 0.0;
        for (int i = static_cast<int>(poly.size()) - 1; i >= 0; --i) acc = acc * s + poly[i] / (i + 1.0);
        return acc * s;
    };
    return {s, integrate(p1), integrate(p2), integrate(p3)};
}

inline double segment_moment(double a, double b, double s, int m) {
    if (m < 0 || m > 6 || m % 2 != 0) throw DomainError("segment_moment: m must be 0, 2, 4 or 6");
    return segment_moments(a, b, s)[m / 2];
}

// Per-history scratch that remembers which slots were written.
class Scratch {
public:
    explicit Scratch(std::size_t n) : values_(n, 0.0), seen_(n, 0) {}
    void add(std::size_t i, double v) {
        if (!seen_[i]) {
            seen_[i] = 1;
            touched_.push_back(i);
        }
        values_[i] += v;
    }
    std::span<const std::size_t> touched() const { return touched_; }
    double value(std::size_t i) const { return values_[i]; }
    void flush_into(TallySet& t) {
        t.add_history_scores(touched_, values_);
        for (std::size_t i : touched_) seen_[i] = 0;
        touched_.clear();
    }

private:
    std::vector<double> values_;
    std::vector<unsigned char> seen_;
    std::vector<std::size_t> touched_;
};

class Walker {
public:
    Walker(const McConfig& cfg, TallySet& tallies)
        : cfg_(cfg),
          t_(tallies),
          d_(static_cast<int>(cfg.problem.d())),
          bins_(tallies.bins()),
          slots_(tallies.slots_per_bin()),
          moment0_(tallies.moment_slot(0)),
          scratch_(tallies.slots_total()) {}

    void history(std::uint64_t index) {
        PhiloxStream rng(cfg_.master_seed, index);
        const FreePathModel& model = cfg_.problem.model();
        const double c = cfg_.problem.c();
        Vec x{}, u{};
        double weight = 1.0;  // c^n for the segment leaving collision n
        for (int n = 0;; ++n) {
            sample_direction_into(d_, rng, std::span<double>(u.data(), d_));
            const double s = model.sample(rng);
            double a = 0.0, b = 0.0;
            for (int i = 0; i < d_; ++i) {
                a += x[i] * x[i];
                b += x[i] * u[i];
            }
            score_segment(n, weight, a, b, s);
            double r2 = 0.0;
            for (int i = 0; i < d_; ++i) {
                x[i] += s * u[i];
                r2 += x[i] * x[i];
            }
            score_collision(n + 1, weight, std::sqrt(r2));
            weight *= c;
            if (weight < cfg_.tail_epsilon) break;
        }
        // The total of each slot is this history's sum over orders.
        const std::size_t scored = scratch_.touched().size();
        const std::size_t per_quantity = static_cast<std::size_t>(bins_) * slots_;
        for (std::size_t k = 0; k < scored; ++k) {
            const std::size_t i = scratch_.touched()[k];  // re-read: add() may grow the list
            const std::size_t q = i / per_quantity, slot = i % slots_;
            scratch_.add((q * bins_ + t_.total_bin()) * slots_ + slot, scratch_.value(i));
        }
        scratch_.flush_into(t_);
    }

private:
    void deposit(Quantity q, int n, int slot, double v) {
        const int bin = n <= t_.n_max() ? n : t_.aggregate_bin();
        scratch_.add((static_cast<std::size_t>(q == Quantity::flux) * bins_ + bin) * slots_ + slot, v);
    }

    void score_collision(int n, double w, double r) {
        const auto& e = t_.shell_edges();
        int slot = t_.overflow_slot();
        if (!e.empty() && r < e.back()) {
            slot = static_cast<int>(std::upper_bound(e.begin(), e.end(), r) - e.begin()) - 1;
        }
        deposit(Quantity::collision, n, slot, w);
        double rm = w;
        for (int k = 0; k < 4; ++k, rm *= r * r) deposit(Quantity::collision, n, moment0_ + k, rm);
    }

    void score_segment(int n, double w, double a, double b, double s) {
        const auto& e = t_.shell_edges();
        if (!e.empty()) {
            // Radial range covered by the segment.
            const double end2 = s * s + 2.0 * b * s + a;
            double rmin2 = std::min(a, end2);
            if (-b > 0.0 && -b < s) rmin2 = std::max(0.0, a - b * b);
            const double rmin = std::sqrt(std::max(0.0, rmin2)), rmax = std::sqrt(std::max(a, end2));
            int first = static_cast<int>(std::upper_bound(e.begin(), e.end(), rmin) - e.begin()) - 1;
            first = std::max(first, 0);
            double inside_prev = first == 0 ? 0.0 : chord_inside(a, b, s, e[first]);
            for (int i = first; i < t_.shells(); ++i) {
                const double inside = chord_inside(a, b, s, e[i + 1]);
                const double len = inside - inside_prev;
                if (len > 0.0) deposit(Quantity::flux, n, i, w * len);
                inside_prev = inside;
                if (e[i + 1] >= rmax) break;
            }
            const double outside = s - chord_inside(a, b, s, e.back());
            if (outside > 0.0) deposit(Quantity::flux, n, t_.overflow_slot(), w * outside);
        } else {
            deposit(Quantity::flux, n, t_.overflow_slot(), w * s);
        }
        const auto moments = segment_moments(a, b, s);
        for (int k = 0; k < 4; ++k) deposit(Quantity::flux, n, moment0_ + k, w * moments[k]);
    }

    const McConfig& cfg_;
    TallySet& t_;
    int d_, bins_, slots_, moment0_;
    Scratch scratch_;
};

inline std::uint64_t block_size(std::uint64_t histories) { return std::max<std::uint64_t>(1024, histories / 256); }

}  // namespace mc_detail

// Isotropic unit vector in d dimensions (d = 1 gives +-1).
template <class Urbg>
std::vector<double> sample_direction(double d, Urbg& rng) {
    if (d != std::floor(d) || d < 1.0 || d > mc_max_dimension) {
        throw DomainError("sample_direction: d must be an integer between 1 and " + std::to_string(mc_max_dimension));
    }
    std::vector<double> out(static_cast<std::size_t>(d));
    mc_detail::sample_direction_into(static_cast<int>(d), rng, out);
    return out;
}

// Histories are cut into fixed blocks whose partial sums are merged in block
// order, so the result is bit-identical for any worker count.
inline TallySet run(const McConfig& cfg) {
    cfg.validate();
    const std::uint64_t block = mc_detail::block_size(cfg.histories);
    const std::uint64_t blocks = (cfg.histories + block - 1) / block;
    const TallySet empty(cfg.problem.d(), cfg.shell_edges, cfg.n_max);
    std::vector<TallySet> partial(blocks, empty);

    auto work = [&](std::uint64_t first_block, std::uint64_t last_block) {
        for (std::uint64_t b = first_block; b < last_block; ++b) {
            mc_detail::Walker walker(cfg, partial[b]);
            const std::uint64_t end = std::min(cfg.histories, (b + 1) * block);
            for (std::uint64_t h = b * block; h < end; ++h) walker.history(h);
        }
    };
    const std::uint64_t workers = std::min<std::uint64_t>(cfg.workers, blocks);
    if (workers <= 1) {
        work(0, blocks);
    } else {
        std::vector<std::jthread> pool;
        for (std::uint64_t w = 0; w < workers; ++w) pool.emplace_back(work, w * blocks / workers, (w + 1) * blocks / workers);
    }

    TallySet out = empty;
    for (const auto& p : partial) out.merge(p);
    return out;
}

inline int key_bin(const TallySet& t, const SolutionKey& key) {
    if (key.is_total()) return t.total_bin();
    const int n = *key.order;
    const int lowest = key.quantity == Quantity::collision ? 1 : 0;
    if (n < lowest) throw DomainError("collision orders start at 1, flux orders at 0");
    if (n > t.n_max()) throw DomainError("order beyond n_max is only tallied in aggregate");
    return n;
}

inline Estimate shell_estimate(const TallySet& t, const SolutionKey& key, int shell) {
    if (shell < 0 || shell >= t.shells()) throw DomainError("shell index out of range");
    const auto& e = t.shell_edges();
    const double vol = shell_volume(t.d(), e[shell], e[shell + 1]);
    const Estimate raw = t.slot_estimate(t.index(key.quantity, key_bin(t, key), shell));
    return {raw.value / vol, raw.std_error / vol};
}

// Shell-averaged density of the chosen order (or the total) at radius r, or
// nullopt past the last shell edge.
inline std::optional<Estimate> density_estimate(const TallySet& t, const SolutionKey& key, double r) {
    if (t.histories_run() == 0) throw StateError("density_estimate: tallies are empty");
    const auto& e = t.shell_edges();
    if (!(r >= 0.0)) throw DomainError("density_estimate: r must be non-negative");
    if (e.empty() || r >= e.back()) return std::nullopt;
    const int shell = static_cast<int>(std::upper_bound(e.begin(), e.end(), r) - e.begin()) - 1;
    return shell_estimate(t, key, shell);
}

// int r^m Omega_d f dr for the chosen order or total.
inline Estimate moment_estimate(const TallySet& t, const SolutionKey& key, int m) {
    if (t.histories_run() == 0) throw StateError("moment_estimate: tallies are empty");
    return t.slot_estimate(t.index(key.quantity, key_bin(t, key), t.moment_slot(m)));
}

// ---------------------------------------------------------------------------
// Flat-file serialization: comment header, then one row per
// (quantity, bin, slot) with the estimate, its error and the raw sums.

inline constexpr int tally_format_version = 1;

inline void write_tallies(std::ostream& os, const TallySet& t, const McConfig* cfg = nullptr) {
    os.precision(17);
    os << "# glbe-tallies version=" << tally_format_version << "\n";
    os << "# columns: quantity bin slot r_lo r_hi value std_error sum sum_sq\n";
    os << "# bin: order number, 'beyond' (orders > n_max) or 'total'; slot: shell index, 'overflow' or m<k>\n";
    os << "# value is a density per unit volume for shells, the per-history mean for overflow and moments\n";
    os << "d " << t.d() << "\n";
    os << "n_max " << t.n_max() << "\n";
    os << "histories " << t.histories_run() << "\n";
    if (cfg) {
        os << "model " << cfg->problem.model().spec() << "\n";
        os << "c " << cfg->problem.c() << "\n";
        os << "seed " << cfg->master_seed << "\n";
        os << "tail_epsilon " << cfg->tail_epsilon << "\n";
    }
    os << "edges";
    for (double e : t.shell_edges()) os << ' ' << e;
    os << "\n";
    const auto& e = t.shell_edges();
    for (Quantity q : {Quantity::collision, Quantity::flux}) {
        for (int bin = q == Quantity::collision ? 1 : 0; bin < t.bins(); ++bin) {
            const std::string bin_name =
                bin == t.total_bin() ? "total" : (bin == t.aggregate_bin() ? "beyond" : std::to_string(bin));
            for (int slot = 0; slot < t.slots_per_bin(); ++slot) {
                const std::size_t i = t.index(q, bin, slot);
                const Estimate est = t.histories_run() ? t.slot_estimate(i) : Estimate{};
                os << "row " << quantity_name(q) << ' ' << bin_name << ' ';
                if (slot < t.shells()) {
                    const double vol = shell_volume(t.d(), e[slot], e[slot + 1]);
                    os << slot << ' ' << e[slot] << ' ' << e[slot + 1] << ' ' << est.value / vol << ' '
                       << est.std_error / vol;
                } else if (slot == t.overflow_slot()) {
                    os << "overflow " << (e.empty() ? 0.0 : e.back()) << " inf " << est.value << ' ' << est.std_error;
                } else {
                    os << 'm' << mc_moment_orders[slot - t.shells() - 1] << " NA NA " << est.value << ' '
                       << est.std_error;
                }
                os << ' ' << t.sums()[i] << ' ' << t.sums_of_squares()[i] << "\n";
            }
        }
    }
}

inline TallySet read_tallies(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# glbe-tallies version=", 0) != 0) {
        throw DomainError("read_tallies: missing glbe-tallies header");
    }
    if (std::stoi(line.substr(line.find('=') + 1)) != tally_format_version) {
        throw DomainError("read_tallies: unsupported format version");
    }
    double d = 0.0;
    int n_max = 0;
    std::uint64_t histories = 0;
    std::vector<double> edges;
    std::optional<TallySet> t;
    std::vector<double> sums, sumsq;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "d") ls >> d;
        else if (tag == "n_max") ls >> n_max;
        else if (tag == "histories") ls >> histories;
        else if (tag == "edges") {
            for (double v; ls >> v;) edges.push_back(v);
        } else if (tag == "row") {
            if (!t) {
                t.emplace(d, edges, n_max);
                sums.assign(t->slots_total(), 0.0);
                sumsq.assign(t->slots_total(), 0.0);
            }
            std::string q, bin, slot, lo, hi, value, err;
            double s = 0.0, s2 = 0.0;
            ls >> q >> bin >> slot >> lo >> hi >> value >> err >> s >> s2;
            if (!ls) throw DomainError("read_tallies: malformed row: " + line);
            const Quantity quantity = q == "flux" ? Quantity::flux : Quantity::collision;
            const int b = bin == "total" ? t->total_bin() : (bin == "beyond" ? t->aggregate_bin() : std::stoi(bin));
            int sl;
            if (slot == "overflow") sl = t->overflow_slot();
            else if (slot[0] == 'm') sl = t->moment_slot(std::stoi(slot.substr(1)));
            else sl = std::stoi(slot);
            const std::size_t i = t->index(quantity, b, sl);
            sums[i] = s;
            sumsq[i] = s2;
        }
    }
    if (!t) t.emplace(d, edges, n_max);
    if (sums.empty()) {
        sums.assign(t->slots_total(), 0.0);
        sumsq.assign(t->slots_total(), 0.0);
    }
    t->restore(std::move(sums), std::move(sumsq), histories);
    return *t;
}

}  // namespace glbe
