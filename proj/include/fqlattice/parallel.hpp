// Copyright 2026 The fqlattice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

namespace fqlattice {

/// A half-open range [lo, hi) of a linear search space.
struct Block {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};

/// Splits [0, total) into at most max_blocks contiguous blocks.  The split
/// depends only on total so results never depend on the worker count.
inline std::vector<Block> make_blocks(std::uint64_t total, std::uint64_t max_blocks = 256) {
  std::vector<Block> out;
  if (total == 0) return out;
  const std::uint64_t nb = std::min(total, max_blocks);
  for (std::uint64_t i = 0; i < nb; ++i) out.push_back({total * i / nb, total * (i + 1) / nb});
  return out;
}

/// Runs fn(block) for every block on up to `workers` threads, then folds
/// the partial results in block order with merge(acc, part).
template <class T, class Fn, class Merge>
T parallel_blocks(const std::vector<Block>& blocks, unsigned workers, T init, Fn fn, Merge merge) {
  std::vector<std::optional<T>> parts(blocks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= blocks.size()) return;
      try {
        parts[i].emplace(fn(blocks[i]));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(blocks.size());
        return;
      }
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1 || blocks.size() <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(blocks.size()));
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  T acc = std::move(init);
  for (auto& p : parts) merge(acc, std::move(*p));
  return acc;
}

}  // namespace fqlattice
