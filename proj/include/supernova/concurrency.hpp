#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

namespace supernova::run {

// Counting semaphore shared by every endpoint: at most `limit` requests in
// flight across the whole pipeline.
class RequestBudget {
 public:
  explicit RequestBudget(int limit) : available_(limit) {}

  void acquire() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
  }

  void release() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++available_;
    }
    cv_.notify_one();
  }

  class Ticket {
   public:
    explicit Ticket(RequestBudget& budget) : budget_(budget) { budget_.acquire(); }
    ~Ticket() { budget_.release(); }
    Ticket(const Ticket&) = delete;
    Ticket& operator=(const Ticket&) = delete;

   private:
    RequestBudget& budget_;
  };

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int available_;
};

// One gate per host: successive requests are spaced by at least the
// configured delay.
class PolitenessGate {
 public:
  explicit PolitenessGate(std::chrono::milliseconds delay) : delay_(delay) {}

  void wait_turn(const std::string& host) {
    std::chrono::steady_clock::time_point wake;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto now = std::chrono::steady_clock::now();
      auto& next_ok = next_ok_[host];
      wake = std::max(now, next_ok);
      next_ok = wake + delay_;
    }
    std::this_thread::sleep_until(wake);
  }

 private:
  std::mutex mu_;
  std::chrono::milliseconds delay_;
  std::map<std::string, std::chrono::steady_clock::time_point> next_ok_;
};

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first thrown
// exception is rethrown on the caller after all workers drain.
template <typename F>
inline void parallel_for(size_t n, int workers, F&& fn) {
  if (n == 0) return;
  size_t thread_count = std::min<size_t>(static_cast<size_t>(std::max(workers, 1)), n);
  if (thread_count <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> threads;
  threads.reserve(thread_count);
  for (size_t t = 0; t < thread_count; ++t) {
    threads.emplace_back([&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= n) return;
        {
          std::lock_guard<std::mutex> lock(error_mu);
          if (error) return;
        }
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace supernova::run
