#pragma once
#include <cstddef>
#include <functional>

namespace volterra {

// 0 selects std::thread::hardware_concurrency()
void set_default_threads(int n);
int default_threads();

// runs body(i) for i in [0, n); each index must write only its own output slot,
// so results do not depend on the thread count
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads = -1);

}  // namespace volterra
