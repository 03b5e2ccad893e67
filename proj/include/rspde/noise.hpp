#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rspde/lattice.hpp"

namespace rspde {

/**
 * Counter-based normal generator: the draw for (seed, level, cell, slot) is a
 * pure function of those keys, so samples do not depend on iteration order.
 */
class CounterNormal {
public:
    explicit CounterNormal(std::uint64_t seed) : seed_(seed) {}

    double uniform(std::uint64_t level, std::uint64_t cell, std::uint64_t slot) const;
    double standard_normal(std::uint64_t level, std::uint64_t cell) const;

private:
    std::uint64_t seed_;
};

/// Stateless 64-bit mix (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent seed for replicate r of an experiment.
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate);

/**
 * Brownian-sheet increments Delta W(C_c) over the n^d cells
 * C_c = prod_j [c_j h, (c_j + 1) h), cell rank c = c_1 + n c_2 + n^2 c_3 with
 * zero-based corner indices.
 */
class NoiseSample {
public:
    NoiseSample(GridSpec spec, std::vector<double> increments, std::uint64_t seed, int level);

    const GridSpec& spec() const { return spec_; }
    std::span<const double> increments() const { return increments_; }
    std::uint64_t seed() const { return seed_; }
    int level() const { return level_; }

    /// Rank of the cell whose lower corner has zero-based indices c.
    std::size_t cell_rank(const MultiIndex& corner) const;
    double increment(const MultiIndex& corner) const { return increments_[cell_rank(corner)]; }

private:
    GridSpec spec_;
    std::vector<double> increments_;
    std::uint64_t seed_;
    int level_;
};

/// n^d independent N(0, n^{-d}) increments, determined bit-for-bit by (spec, seed, level).
NoiseSample sample_noise(const GridSpec& spec, std::uint64_t seed, int level = 0);

/**
 * Conditional refinement onto the 2n lattice. Each parent increment P is split
 * among its m = 2^d children as P/m + (Y_i - mean(Y)), Y_i iid N(0, (2n)^{-d}),
 * which is the law of independent fine increments given their sum.
 */
NoiseSample refine_noise(const NoiseSample& parent, int factor = 2);

/// Sums each block of 2^d child increments; inverse of refine_noise on the parent.
NoiseSample coarsen_noise(const NoiseSample& child, int factor = 2);

/// Entry k is n^d sigma_k Delta W(cell with lower corner x_k).
GridField discrete_noise_term(const NoiseSample& sample, const GridField& sigma_values);

/// Little-endian float64 increments in natural cell order.
void write_increments(const NoiseSample& sample, const std::filesystem::path& path);
NoiseSample read_increments(const GridSpec& spec, std::uint64_t seed, int level, const std::filesystem::path& path);

}  // namespace rspde
