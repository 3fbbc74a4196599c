#pragma once

// Replica-level parallelism. Experiments loop over independent replicas whose
// random streams are keyed by replica index, so scheduling order cannot change
// results as long as each replica writes only to its own output slot (floats)
// or to per-thread integer accumulators that are merged afterwards.
//
// threads <= 1 selects the serial reference loop; the OpenMP path must produce
// byte-identical results, which the test suite checks.

#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace occlab {

struct ExecPolicy {
  int threads = 1;
};

inline int effective_threads(const ExecPolicy& policy) {
#ifdef _OPENMP
  return policy.threads >= 1 ? policy.threads : 1;
#else
  return 1;
#endif
}

template <class Body>
void replica_for(std::uint64_t n, const ExecPolicy& policy, Body&& body) {
  if (effective_threads(policy) <= 1) {
    for (std::uint64_t r = 0; r < n; ++r) body(r, 0);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) num_threads(policy.threads)
  for (long long r = 0; r < static_cast<long long>(n); ++r) {
    body(static_cast<std::uint64_t>(r), omp_get_thread_num());
  }
#else
  for (std::uint64_t r = 0; r < n; ++r) body(r, 0);
#endif
}

// Per-thread accumulator slots for replica_for bodies. Only use these for
// order-independent updates (integer counters); floating-point reductions
// belong in per-replica slots reduced serially.
template <class Acc>
std::vector<Acc> make_thread_accumulators(const ExecPolicy& policy, const Acc& init) {
  return std::vector<Acc>(static_cast<std::size_t>(effective_threads(policy)), init);
}

}  // namespace occlab
