#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace mlpr {

/// Process-wide worker cap for chunk loops. 0 means hardware concurrency.
void set_max_threads(int count);
int max_threads();

/// Fixed chunk width used by the samplers and feature accumulators. The chunk
/// grid -- not the worker count -- determines RNG streams and merge order, so
/// results are identical at any parallelism level.
inline constexpr int kChunkSize = 512;

inline int chunk_count(int total) { return (total + kChunkSize - 1) / kChunkSize; }

/// Runs fn(chunk_index, begin, end) over [0, total) split into kChunkSize
/// chunks. Chunks are claimed by an atomic counter; fn must write only to
/// slots it owns.
void parallel_chunks(int total, const std::function<void(int, int, int)>& fn);

} // namespace mlpr
