#include "recourse/threading.hpp"

#include <algorithm>

namespace recourse {

namespace {

// Chunk layout for lane `lane` out of `width` lanes over [0, n).
std::pair<std::size_t, std::size_t> chunk_range(std::size_t n, unsigned width, unsigned lane) {
  std::size_t per = (n + width - 1) / width;
  std::size_t begin = std::min(n, per * lane);
  std::size_t end = std::min(n, begin + per);
  return {begin, end};
}

}  // namespace

ThreadPool::ThreadPool(unsigned threads) : width_(std::max(1u, threads)) {
  errors_.resize(width_);
  // Lane 0 is the calling thread; only lanes 1.. get workers.
  for (unsigned lane = 1; lane < width_; ++lane)
    workers_.emplace_back([this, lane] { worker_loop(lane); });
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  cv_job_.notify_all();
  for (auto& w : workers_) w.join();
}

void ThreadPool::run(std::size_t n, const std::function<void(std::size_t, std::size_t, unsigned)>& fn) {
  if (width_ == 1) {
    fn(0, n, 0);
    return;
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    job_n_ = n;
    job_fn_ = &fn;
    remaining_ = width_ - 1;
    std::fill(errors_.begin(), errors_.end(), nullptr);
    ++generation_;
  }
  cv_job_.notify_all();

  auto [b0, e0] = chunk_range(n, width_, 0);
  try {
    fn(b0, e0, 0);
  } catch (...) {
    errors_[0] = std::current_exception();
  }

  {
    std::unique_lock<std::mutex> lock(mu_);
    cv_done_.wait(lock, [this] { return remaining_ == 0; });
    job_fn_ = nullptr;
  }
  for (auto& err : errors_)
    if (err) std::rethrow_exception(err);
}

void ThreadPool::worker_loop(unsigned lane) {
  std::uint64_t seen = 0;
  for (;;) {
    const std::function<void(std::size_t, std::size_t, unsigned)>* fn = nullptr;
    std::size_t n = 0;
    {
      std::unique_lock<std::mutex> lock(mu_);
      cv_job_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      fn = job_fn_;
      n = job_n_;
    }
    auto [b, e] = chunk_range(n, width_, lane);
    try {
      (*fn)(b, e, lane);
    } catch (...) {
      errors_[lane] = std::current_exception();
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      --remaining_;
    }
    cv_done_.notify_one();
  }
}

}  // namespace recourse
