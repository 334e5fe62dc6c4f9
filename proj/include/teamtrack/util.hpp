#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace teamtrack {

// Worker cap from TEAMTRACK_THREADS; 0 or unset means sequential.
int worker_count();

// Runs fn(i) for i in [0, n). Splits across workers when worker_count() > 1;
// fn must not touch shared mutable state across indices.
void parallel_for(int n, const std::function<void(int)>& fn);

// FNV-1a, used to tag runs with their resolved configuration.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace teamtrack
