#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace igl {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct DataError : Error { using Error::Error; };
struct UnsupportedError : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };

using FeatureVector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Deterministic random streams
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(x);
}

inline constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// xoshiro256** stream keyed by (seed, stream_id). Every draw is computed with
/// integer arithmetic and explicit conversions, so sequences are identical on
/// every platform.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t sm = detail::mix(seed, stream_id);
        for (auto& s : state_) s = detail::splitmix64(sm);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next_u64(); }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, n) (Lemire's multiply-and-reject).
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw RangeError("uniform_int: empty range");
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Standard normal via Box-Muller; the spare value is cached.
    double normal() noexcept {
        if (spare_) {
            double v = *spare_;
            spare_.reset();
            return v;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        return r * std::cos(theta);
    }

    /// Index drawn from an (unnormalized) discrete law by inverse CDF on one uniform.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw ValidationError("categorical: weights sum to zero");
        const double u = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        // Rounding can leave u == total; fall back to the last positive weight.
        for (std::size_t i = weights.size(); i-- > 0;)
            if (weights[i] > 0.0) return i;
        return weights.size() - 1;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_[4]{};
    std::optional<double> spare_;
};

/// Child stream keyed by (parent seed, parent stream, label). Independent of
/// how many draws the parent has already made.
inline RngStream fork_rng(const RngStream& parent, std::string_view label) {
    return RngStream(parent.seed(), detail::mix(parent.stream_id(), detail::fnv1a(label)));
}

/// Like fork_rng, but also keyed by one draw from the parent, so repeated
/// calls on the same parent give different children.
inline RngStream split_rng(RngStream& parent, std::string_view label) {
    const std::uint64_t salt = parent.next_u64();
    return RngStream(parent.seed(), detail::mix(detail::mix(parent.stream_id(), detail::fnv1a(label)), salt));
}

// ---------------------------------------------------------------------------
// Interaction logs
// ---------------------------------------------------------------------------

struct Interaction {
    FeatureVector context;
    std::size_t action = 0;
    FeatureVector feedback;
    double behavior_prob = 1.0;
};

/// Append-only log of (x, a, y, d(a|x)) tuples sharing K and dimensions.
class InteractionLog {
public:
    explicit InteractionLog(std::size_t k_actions) : k_(k_actions) {
        if (k_actions < 2) throw ValidationError("InteractionLog: K must be >= 2");
    }

    std::size_t k_actions() const noexcept { return k_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    std::size_t context_dim() const noexcept { return context_dim_; }
    std::size_t feedback_dim() const noexcept { return feedback_dim_; }

    const Interaction& operator[](std::size_t i) const { return items_[i]; }
    std::span<const Interaction> items() const noexcept { return items_; }
    auto begin() const noexcept { return items_.begin(); }
    auto end() const noexcept { return items_.end(); }

    void append(Interaction item) {
        if (item.action >= k_) throw RangeError("InteractionLog: action out of range");
        if (!(item.behavior_prob > 0.0 && item.behavior_prob <= 1.0))
            throw ValidationError("InteractionLog: behavior_prob must lie in (0, 1]");
        if (items_.empty() && context_dim_ == 0 && feedback_dim_ == 0) {
            context_dim_ = item.context.size();
            feedback_dim_ = item.feedback.size();
        } else if (item.context.size() != context_dim_ || item.feedback.size() != feedback_dim_) {
            throw DimensionError("InteractionLog: dimension mismatch on append");
        }
        items_.push_back(std::move(item));
    }

    void reserve(std::size_t n) { items_.reserve(n); }

private:
    friend InteractionLog log_window(const InteractionLog&, std::size_t, std::size_t);

    std::size_t k_;
    std::size_t context_dim_ = 0;
    std::size_t feedback_dim_ = 0;
    std::vector<Interaction> items_;
};

/// Items [from, to) of `log`, with the same K and dimensions.
inline InteractionLog log_window(const InteractionLog& log, std::size_t from, std::size_t to) {
    if (from > to || to > log.size())
        throw RangeError("log_window: [" + std::to_string(from) + ", " + std::to_string(to) +
                         ") outside log of length " + std::to_string(log.size()));
    InteractionLog out(log.k_actions());
    out.context_dim_ = log.context_dim_;
    out.feedback_dim_ = log.feedback_dim_;
    out.items_.assign(log.items_.begin() + static_cast<std::ptrdiff_t>(from),
                      log.items_.begin() + static_cast<std::ptrdiff_t>(to));
    return out;
}

// ---------------------------------------------------------------------------
// Run traces
// ---------------------------------------------------------------------------

enum class Mode : std::uint8_t { explore, exploit };

inline const char* to_string(Mode m) { return m == Mode::explore ? "explore" : "exploit"; }

struct RoundEntry {
    std::uint64_t round = 0;  // Algorithm round i (1-based); batch runs use the item index
    Mode mode = Mode::explore;
    std::size_t action = 0;
    int oracle_reward = 0;
    std::optional<double> indicator;
    std::uint32_t restart_count = 0;
};

struct EvalPoint {
    std::uint64_t round = 0;
    double accuracy = 0.0;  // percent
};

/// Per-interaction trace plus run summary. Rewards come from the evaluation
/// oracle and are never fed back to the learner.
struct RunRecord {
    std::vector<RoundEntry> entries;
    std::vector<EvalPoint> evals;
    double final_accuracy = 0.0;  // percent
    double final_value = 0.0;     // oracle V of the final greedy policy
    double v_star = 1.0;
    std::uint32_t restarts = 0;
    bool restart_exhausted = false;

    std::vector<double> cumulative_regret() const {
        std::vector<double> out;
        out.reserve(entries.size());
        double acc = 0.0;
        for (const auto& e : entries) {
            acc += v_star - static_cast<double>(e.oracle_reward);
            out.push_back(acc);
        }
        return out;
    }
};

}  // namespace igl
