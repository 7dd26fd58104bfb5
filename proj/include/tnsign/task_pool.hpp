#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace tnsign {

// Bounded worker pool for independent trial tasks. With workers <= 1 tasks
// run inline on wait(), so single-threaded runs stay strictly deterministic.
class TaskPool {
 public:
  explicit TaskPool(int workers) : workers_(workers < 1 ? 1 : workers) {}
  ~TaskPool() { wait(); }

  void submit(std::function<void()> task) { tasks_.push_back(std::move(task)); }

  void wait() {
    if (workers_ == 1) {
      for (auto& t : tasks_) t();
      tasks_.clear();
      return;
    }
    std::mutex mu;
    std::size_t next = 0;
    auto worker = [&] {
      for (;;) {
        std::size_t idx;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= tasks_.size()) return;
          idx = next++;
        }
        tasks_[idx]();
      }
    };
    std::vector<std::thread> threads;
    int n = std::min<int>(workers_, static_cast<int>(tasks_.size()));
    threads.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    tasks_.clear();
  }

 private:
  int workers_;
  std::deque<std::function<void()>> tasks_;
};

}  // namespace tnsign
