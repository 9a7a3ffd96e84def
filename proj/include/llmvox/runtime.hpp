// Execution contexts for the streaming engine. Wall mode runs stages as real
// threads against the monotonic clock. Sim mode runs the same stage bodies
// under a cooperative baton-passing scheduler: exactly one stage steps at a
// time, blocking points hand control to the next runnable stage, and the
// virtual clock advances to the earliest pending timer when every stage is
// blocked. Compute costs are charged to the virtual clock explicitly, which
// makes every sim run bit-reproducible.
#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "llmvox/common.hpp"

namespace llmvox {

enum class ClockMode { kSim, kWall };

class CoopScheduler;

// Queue wait registration point; one side of one queue.
struct WaitSlot {
    std::condition_variable cv;  // wall mode
    int waiting_entity = -1;     // sim mode
};

class ExecContext {
  public:
    virtual ~ExecContext() = default;
    virtual int64_t now_us() = 0;
    virtual void sleep_until_us(int64_t t) = 0;
    // Modeled compute cost: advances the sim clock; a no-op on the wall
    // clock, where the real computation already took real time.
    virtual void charge_us(int64_t cost) = 0;
    virtual void spawn(const std::string& name, std::function<void()> body) = 0;
    // Runs all spawned entities to completion; rethrows the first entity
    // failure.
    virtual void run_to_completion() = 0;
    virtual CoopScheduler* scheduler() { return nullptr; }

    void sleep_for_us(int64_t d) { sleep_until_us(now_us() + d); }
};

class WallContext final : public ExecContext {
  public:
    WallContext() : t0_(std::chrono::steady_clock::now()) {}

    int64_t now_us() override {
        return std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0_)
            .count();
    }
    void sleep_until_us(int64_t t) override { std::this_thread::sleep_until(t0_ + std::chrono::microseconds(t)); }
    void charge_us(int64_t) override {}
    void spawn(const std::string& name, std::function<void()> body) override;
    void run_to_completion() override;

  private:
    std::chrono::steady_clock::time_point t0_;
    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::exception_ptr first_error_;
};

class CoopScheduler final : public ExecContext {
  public:
    CoopScheduler() = default;
    ~CoopScheduler() override;

    int64_t now_us() override {
        std::lock_guard<std::mutex> lk(mu_);
        return now_us_;
    }
    void sleep_until_us(int64_t t) override;
    void charge_us(int64_t cost) override { sleep_until_us(now_us() + cost); }
    void spawn(const std::string& name, std::function<void()> body) override;
    void run_to_completion() override;
    CoopScheduler* scheduler() override { return this; }

    // Blocks the calling entity until notify() hits the slot. The caller must
    // not hold any queue lock.
    void block_on(WaitSlot& slot);
    // Marks the slot's waiter runnable; the caller keeps running until its
    // own next blocking point.
    void notify(WaitSlot& slot);

  private:
    enum class State { kReady, kRunning, kBlocked, kTimer, kDone };

    struct Entity {
        std::string name;
        std::function<void()> body;
        std::thread thread;
        std::condition_variable cv;
        State state = State::kReady;
        int64_t wake_time = 0;
    };

    int current_entity_locked() const;
    void schedule_next_locked(std::unique_lock<std::mutex>& lk);
    void wait_until_running_locked(std::unique_lock<std::mutex>& lk, int id);
    void entity_main(int id);
    void abort_locked(std::exception_ptr err);

    std::mutex mu_;
    std::vector<std::unique_ptr<Entity>> entities_;
    std::deque<int> ready_;
    std::condition_variable done_cv_;
    size_t done_count_ = 0;
    int64_t now_us_ = 0;
    bool started_ = false;
    bool aborted_ = false;
    std::exception_ptr first_error_;
};

std::unique_ptr<ExecContext> make_context(ClockMode mode);

// Bounded single-producer single-consumer FIFO with blocking push
// (backpressure) and close semantics. Works under both contexts.
template <class T>
class BoundedQueue {
  public:
    BoundedQueue(std::string name, size_t capacity, ExecContext& ctx)
        : name_(std::move(name)), cap_(capacity), sched_(ctx.scheduler()) {
        if (capacity < 1) throw ConfigError("queue " + name_ + ": capacity must be >= 1");
    }

    void push(T item) {
        std::unique_lock<std::mutex> lk(mu_);
        while (q_.size() >= cap_ && !closed_) {
            if (sched_) {
                lk.unlock();
                sched_->block_on(producer_slot_);
                lk.lock();
            } else {
                producer_slot_.cv.wait(lk);
            }
        }
        if (closed_) throw std::logic_error("push to closed queue " + name_);
        q_.push_back(std::move(item));
        peak_ = std::max(peak_, q_.size());
        notify_locked(consumer_slot_);
    }

    std::optional<T> pop() {
        std::unique_lock<std::mutex> lk(mu_);
        while (q_.empty() && !closed_) {
            if (sched_) {
                lk.unlock();
                sched_->block_on(consumer_slot_);
                lk.lock();
            } else {
                consumer_slot_.cv.wait(lk);
            }
        }
        if (q_.empty()) return std::nullopt;  // closed and drained
        T item = std::move(q_.front());
        q_.pop_front();
        notify_locked(producer_slot_);
        return item;
    }

    void close() {
        std::lock_guard<std::mutex> lk(mu_);
        closed_ = true;
        if (sched_) {
            sched_->notify(producer_slot_);
            sched_->notify(consumer_slot_);
        } else {
            producer_slot_.cv.notify_all();
            consumer_slot_.cv.notify_all();
        }
    }

    size_t peak_occupancy() const {
        std::lock_guard<std::mutex> lk(mu_);
        return peak_;
    }
    const std::string& name() const { return name_; }

  private:
    void notify_locked(WaitSlot& slot) {
        if (sched_)
            sched_->notify(slot);
        else
            slot.cv.notify_one();
    }

    std::string name_;
    size_t cap_;
    CoopScheduler* sched_;
    mutable std::mutex mu_;
    std::deque<T> q_;
    WaitSlot producer_slot_, consumer_slot_;
    size_t peak_ = 0;
    bool closed_ = false;
};

}  // namespace llmvox
