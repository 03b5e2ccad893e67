#include "rspde/noise.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rspde {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate) {
    return mix64(mix64(seed) ^ (replicate * 0xD6E8FEB86659FD93ULL));
}

double CounterNormal::uniform(std::uint64_t level, std::uint64_t cell, std::uint64_t slot) const {
    std::uint64_t x = mix64(seed_ ^ mix64(level * 0xA0761D6478BD642FULL));
    x = mix64(x ^ (cell * 0xE7037ED1A0B428DBULL));
    x = mix64(x ^ (slot * 0x8EBC6AF09C88C6E3ULL));
    // (0,1), never exactly zero
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

double CounterNormal::standard_normal(std::uint64_t level, std::uint64_t cell) const {
    const double u1 = uniform(level, cell, 0);
    const double u2 = uniform(level, cell, 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

NoiseSample::NoiseSample(GridSpec spec, std::vector<double> increments, std::uint64_t seed, int level)
    : spec_(spec), increments_(std::move(increments)), seed_(seed), level_(level) {
    if (increments_.size() != spec_.cell_count()) {
        throw std::invalid_argument("noise sample needs " + std::to_string(spec_.cell_count()) + " increments");
    }
}

std::size_t NoiseSample::cell_rank(const MultiIndex& corner) const {
    const auto n = static_cast<std::size_t>(spec_.n());
    std::size_t r = 0;
    std::size_t stride = 1;
    for (int j = 0; j < spec_.dim(); ++j) {
        if (corner[j] < 0 || corner[j] >= spec_.n()) throw std::domain_error("cell corner outside the lattice");
        r += stride * static_cast<std::size_t>(corner[j]);
        stride *= n;
    }
    return r;
}

namespace {

// Increments live on a dyadic grid of spacing 2^-45. With |values| well below
// 2^8 every partial sum of children is then exact, so refinement and
// coarsening commute bit-for-bit regardless of summation order.
constexpr double kQuantum = 0x1.0p-45;

double quantize(double x) { return std::nearbyint(x / kQuantum) * kQuantum; }

}  // namespace

NoiseSample sample_noise(const GridSpec& spec, std::uint64_t seed, int level) {
    const CounterNormal rng(seed);
    const double sd = std::sqrt(std::pow(spec.h(), spec.dim()));
    std::vector<double> inc(spec.cell_count());
    for (std::size_t c = 0; c < inc.size(); ++c) {
        inc[c] = quantize(sd * rng.standard_normal(static_cast<std::uint64_t>(level), c));
    }
    return NoiseSample(spec, std::move(inc), seed, level);
}

NoiseSample refine_noise(const NoiseSample& parent, int factor) {
    if (factor != 2) throw std::invalid_argument("noise refinement supports factor 2 only");
    const GridSpec& ps = parent.spec();
    const int d = ps.dim();
    const GridSpec cs(d, 2 * ps.n());
    const int child_level = parent.level() + 1;
    const CounterNormal rng(parent.seed());
    const double sd = std::sqrt(std::pow(cs.h(), d));
    const int children = 1 << d;

    std::vector<double> inc(cs.cell_count());
    std::array<std::size_t, 1 << kMaxDim> rank{};
    std::array<double, 1 << kMaxDim> y{};
    NoiseSample scratch(cs, std::vector<double>(cs.cell_count(), 0.0), parent.seed(), child_level);

    for (std::size_t pc = 0; pc < ps.cell_count(); ++pc) {
        MultiIndex corner{0, 0, 0};
        std::size_t r = pc;
        for (int j = 0; j < d; ++j) {
            corner[j] = static_cast<int>(r % static_cast<std::size_t>(ps.n()));
            r /= static_cast<std::size_t>(ps.n());
        }
        double mean = 0.0;
        for (int c = 0; c < children; ++c) {
            MultiIndex child{0, 0, 0};
            for (int j = 0; j < d; ++j) child[j] = 2 * corner[j] + ((c >> j) & 1);
            rank[static_cast<std::size_t>(c)] = scratch.cell_rank(child);
            y[static_cast<std::size_t>(c)] =
                sd * rng.standard_normal(static_cast<std::uint64_t>(child_level), rank[static_cast<std::size_t>(c)]);
            mean += y[static_cast<std::size_t>(c)];
        }
        mean /= children;
        const double share = parent.increments()[pc] / children;
        // the last child absorbs the rounding so the children sum to the parent exactly
        double sum = 0.0;
        for (int c = 0; c < children - 1; ++c) {
            const double value = quantize(share + (y[static_cast<std::size_t>(c)] - mean));
            inc[rank[static_cast<std::size_t>(c)]] = value;
            sum += value;
        }
        const double last = parent.increments()[pc] - sum;
        inc[rank[static_cast<std::size_t>(children - 1)]] = last;
    }
    return NoiseSample(cs, std::move(inc), parent.seed(), child_level);
}

NoiseSample coarsen_noise(const NoiseSample& child, int factor) {
    if (factor != 2) throw std::invalid_argument("noise coarsening supports factor 2 only");
    const GridSpec& cs = child.spec();
    if (cs.n() % 2 != 0) throw std::invalid_argument("cannot coarsen a lattice with odd n");
    const int d = cs.dim();
    const GridSpec ps(d, cs.n() / 2);
    const int children = 1 << d;
    std::vector<double> inc(ps.cell_count(), 0.0);
    for (std::size_t pc = 0; pc < ps.cell_count(); ++pc) {
        MultiIndex corner{0, 0, 0};
        std::size_t r = pc;
        for (int j = 0; j < d; ++j) {
            corner[j] = static_cast<int>(r % static_cast<std::size_t>(ps.n()));
            r /= static_cast<std::size_t>(ps.n());
        }
        double sum = 0.0;
        for (int c = 0; c < children - 1; ++c) {
            MultiIndex ch{0, 0, 0};
            for (int j = 0; j < d; ++j) ch[j] = 2 * corner[j] + ((c >> j) & 1);
            sum += child.increment(ch);
        }
        MultiIndex last{0, 0, 0};
        for (int j = 0; j < d; ++j) last[j] = 2 * corner[j] + 1;
        inc[pc] = sum + child.increment(last);
    }
    return NoiseSample(ps, std::move(inc), child.seed(), child.level() - 1);
}

GridField discrete_noise_term(const NoiseSample& sample, const GridField& sigma_values) {
    if (!(sample.spec() == sigma_values.spec())) {
        throw std::invalid_argument("noise sample and sigma values live on different lattices");
    }
    const GridSpec& spec = sample.spec();
    const double scale = static_cast<double>(spec.cell_count());  // n^d
    GridField out(spec);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const MultiIndex i = unrank(k + 1, spec);
        out[k] = scale * sigma_values[k] * sample.increment(i);
    }
    return out;
}

void write_increments(const NoiseSample& sample, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (double v : sample.increments()) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        char bytes[8];
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
        out.write(bytes, 8);
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

NoiseSample read_increments(const GridSpec& spec, std::uint64_t seed, int level, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<double> inc(spec.cell_count());
    for (double& v : inc) {
        unsigned char bytes[8];
        if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw std::runtime_error(path.string() + " is truncated");
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
        v = std::bit_cast<double>(bits);
    }
    if (in.peek() != std::char_traits<char>::eof()) throw std::runtime_error(path.string() + " has trailing bytes");
    return NoiseSample(spec, std::move(inc), seed, level);
}

}  // namespace rspde
