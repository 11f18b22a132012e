#pragma once

#include "mflab/types.hpp"

#include <cstdint>
#include <random>

namespace mflab {

// Counter-based seed splitter: every randomized routine draws its own stream
// derived from (master seed, stream counter), so parallel or reordered
// evaluation cannot change the numbers.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t counter) {
  return splitmix64(master ^ splitmix64(counter + 1));
}

inline std::mt19937_64 seeded_engine(std::uint64_t master, std::uint64_t counter) {
  return std::mt19937_64(split_seed(master, counter));
}

Vector haar_random_vector(Eigen::Index dim, std::mt19937_64& rng);

// Haar-random pure state mixed with the tracial state at a uniform weight;
// covers both the boundary and the interior of the state space.
Matrix random_density_matrix(Eigen::Index dim, std::mt19937_64& rng);

Matrix random_matrix(Eigen::Index dim, std::mt19937_64& rng);

Matrix random_hermitian(Eigen::Index dim, std::mt19937_64& rng);

}  // namespace mflab
