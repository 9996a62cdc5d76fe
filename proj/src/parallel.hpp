#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace divscale::detail {

// Samples are split into fixed-size chunks whose boundaries do not depend on
// the thread count; each chunk produces a partial result and partials are
// combined in chunk order, so reductions are bit-reproducible.
inline constexpr std::size_t kChunkSize = 32;

template <typename Partial, typename MakeChunk, typename Combine>
Partial chunked_reduce(std::size_t count, Partial init, MakeChunk make_chunk, Combine combine) {
  const std::size_t chunks = (count + kChunkSize - 1) / kChunkSize;
  std::vector<Partial> partials(chunks, init);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(chunks, std::thread::hardware_concurrency()));
  auto run = [&](std::size_t worker) {
    for (std::size_t c = worker; c < chunks; c += workers) {
      const std::size_t begin = c * kChunkSize;
      make_chunk(partials[c], begin, std::min(count, begin + kChunkSize));
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  Partial total = std::move(init);
  for (auto& p : partials) combine(total, p);
  return total;
}

}  // namespace divscale::detail
