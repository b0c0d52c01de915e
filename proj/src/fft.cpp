#include "pdsage/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace pdsage::fft {
namespace {

// FFTW planning is not thread-safe; execution through the new-array
// interface is. Plans are built once per shape and kept for the process.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, std::size_t count, Direction dir) {
    const Key key{n, count, dir == Direction::kForward ? FFTW_FORWARD : FFTW_BACKWARD};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const int len = static_cast<int>(n);
    fftw_complex* scratch = fftw_alloc_complex(n * count);
    fftw_plan plan = fftw_plan_many_dft(1, &len, static_cast<int>(count), scratch, nullptr, 1, len,
                                        scratch, nullptr, 1, len, std::get<2>(key),
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (plan == nullptr) throw std::runtime_error("fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  using Key = std::tuple<std::size_t, std::size_t, int>;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void transform_batch(std::span<cd> data, std::size_t n, std::size_t count, Direction dir) {
  if (n == 0 || count == 0) return;
  if (data.size() != n * count) throw std::invalid_argument("fft batch size mismatch");
  fftw_plan plan = cache().get(n, count, dir);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

std::vector<cd> forward(std::span<const cd> x) {
  std::vector<cd> out(x.begin(), x.end());
  transform_batch(out, out.size(), 1, Direction::kForward);
  return out;
}

std::vector<cd> inverse(std::span<const cd> x) {
  std::vector<cd> out(x.begin(), x.end());
  transform_batch(out, out.size(), 1, Direction::kBackward);
  const double scale = out.empty() ? 0.0 : 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace pdsage::fft
