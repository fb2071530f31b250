#pragma once

#include <cstddef>
#include <functional>

namespace alkit {

/// 0 means "all hardware threads".
std::size_t resolve_workers(std::size_t requested) noexcept;

/// Runs fn(task) for task in [0, tasks) on up to `workers` threads. Tasks must write to
/// disjoint outputs; the first exception thrown by any task is rethrown after joining.
void parallel_for(std::size_t tasks, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace alkit
