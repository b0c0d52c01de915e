#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pdsage/types.hpp"

namespace pdsage::fft {

enum class Direction {
  kForward,   // sum x[n] e^{-j 2 pi n q / N}
  kBackward,  // sum x[n] e^{+j 2 pi n q / N}
};

/// Unnormalized in-place transform of `count` contiguous signals of length n.
/// Safe to call concurrently from several threads.
void transform_batch(std::span<cd> data, std::size_t n, std::size_t count, Direction dir);

/// Unnormalized forward DFT.
std::vector<cd> forward(std::span<const cd> x);

/// Inverse DFT with 1/N normalization, so sum |x|^2 = N * sum |ifft(x)|^2.
std::vector<cd> inverse(std::span<const cd> x);

}  // namespace pdsage::fft
