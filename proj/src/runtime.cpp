#include "llmvox/runtime.hpp"

#include <algorithm>
#include <limits>

namespace llmvox {

namespace {
thread_local int tl_entity_id = -1;

// Unwinds an entity body when the scheduler aborts; deliberately not derived
// from std::exception so stage-level error handling cannot swallow it.
struct AbortSignal {};
}  // namespace

// ---- WallContext ----

void WallContext::spawn(const std::string& name, std::function<void()> body) {
    threads_.emplace_back([this, name, body = std::move(body)] {
        try {
            body();
        } catch (...) {
            std::lock_guard<std::mutex> lk(mu_);
            if (!first_error_) first_error_ = std::current_exception();
        }
    });
}

void WallContext::run_to_completion() {
    for (auto& t : threads_)
        if (t.joinable()) t.join();
    threads_.clear();
    if (first_error_) std::rethrow_exception(std::exchange(first_error_, nullptr));
}

// ---- CoopScheduler ----

CoopScheduler::~CoopScheduler() {
    {
        std::unique_lock<std::mutex> lk(mu_);
        if (done_count_ < entities_.size()) abort_locked(nullptr);
        done_cv_.wait(lk, [&] { return done_count_ == entities_.size(); });
    }
    for (auto& e : entities_)
        if (e->thread.joinable()) e->thread.join();
}

int CoopScheduler::current_entity_locked() const {
    const int id = tl_entity_id;
    if (id < 0 || static_cast<size_t>(id) >= entities_.size())
        throw std::logic_error("sim-clock blocking call outside a pipeline stage");
    return id;
}

void CoopScheduler::wait_until_running_locked(std::unique_lock<std::mutex>& lk, int id) {
    entities_[id]->cv.wait(lk, [&] { return aborted_ || entities_[id]->state == State::kRunning; });
    if (aborted_) throw AbortSignal{};
}

void CoopScheduler::schedule_next_locked(std::unique_lock<std::mutex>&) {
    if (aborted_) return;
    if (ready_.empty()) {
        int64_t min_t = std::numeric_limits<int64_t>::max();
        for (const auto& e : entities_)
            if (e->state == State::kTimer) min_t = std::min(min_t, e->wake_time);
        if (min_t == std::numeric_limits<int64_t>::max()) {
            if (done_count_ < entities_.size()) {
                std::string stuck;
                for (const auto& e : entities_)
                    if (e->state == State::kBlocked) stuck += (stuck.empty() ? "" : ", ") + e->name;
                abort_locked(std::make_exception_ptr(
                    std::runtime_error("pipeline deadlock: stages blocked with no pending timers (" + stuck + ")")));
            }
            return;
        }
        now_us_ = std::max(now_us_, min_t);
        // wake every timer due at the new time, in entity order
        for (size_t i = 0; i < entities_.size(); ++i) {
            auto& e = *entities_[i];
            if (e.state == State::kTimer && e.wake_time <= now_us_) {
                e.state = State::kReady;
                ready_.push_back(static_cast<int>(i));
            }
        }
    }
    const int next = ready_.front();
    ready_.pop_front();
    entities_[next]->state = State::kRunning;
    entities_[next]->cv.notify_one();
}

void CoopScheduler::abort_locked(std::exception_ptr err) {
    if (err && !first_error_) first_error_ = err;
    aborted_ = true;
    for (auto& e : entities_) e->cv.notify_all();
    done_cv_.notify_all();
}

void CoopScheduler::spawn(const std::string& name, std::function<void()> body) {
    std::lock_guard<std::mutex> lk(mu_);
    if (started_) throw std::logic_error("spawn after scheduler start");
    const int id = static_cast<int>(entities_.size());
    auto e = std::make_unique<Entity>();
    e->name = name;
    e->body = std::move(body);
    e->state = State::kReady;
    entities_.push_back(std::move(e));
    ready_.push_back(id);
    entities_[id]->thread = std::thread([this, id] { entity_main(id); });
}

void CoopScheduler::entity_main(int id) {
    tl_entity_id = id;
    try {
        {
            std::unique_lock<std::mutex> lk(mu_);
            wait_until_running_locked(lk, id);
        }
        entities_[id]->body();
    } catch (const AbortSignal&) {
    } catch (...) {
        std::unique_lock<std::mutex> lk(mu_);
        abort_locked(std::current_exception());
    }
    std::unique_lock<std::mutex> lk(mu_);
    entities_[id]->state = State::kDone;
    ++done_count_;
    if (done_count_ == entities_.size())
        done_cv_.notify_all();
    else if (!aborted_)
        schedule_next_locked(lk);
}

void CoopScheduler::sleep_until_us(int64_t t) {
    std::unique_lock<std::mutex> lk(mu_);
    const int id = current_entity_locked();
    if (t <= now_us_) return;
    entities_[id]->state = State::kTimer;
    entities_[id]->wake_time = t;
    schedule_next_locked(lk);
    wait_until_running_locked(lk, id);
}

void CoopScheduler::block_on(WaitSlot& slot) {
    std::unique_lock<std::mutex> lk(mu_);
    const int id = current_entity_locked();
    slot.waiting_entity = id;
    entities_[id]->state = State::kBlocked;
    schedule_next_locked(lk);
    wait_until_running_locked(lk, id);
}

void CoopScheduler::notify(WaitSlot& slot) {
    std::lock_guard<std::mutex> lk(mu_);
    if (slot.waiting_entity < 0) return;
    const int id = slot.waiting_entity;
    slot.waiting_entity = -1;
    entities_[id]->state = State::kReady;
    ready_.push_back(id);
}

void CoopScheduler::run_to_completion() {
    std::unique_lock<std::mutex> lk(mu_);
    if (started_) throw std::logic_error("scheduler already ran");
    started_ = true;
    if (!entities_.empty()) {
        schedule_next_locked(lk);
        done_cv_.wait(lk, [&] { return done_count_ == entities_.size(); });
    }
    lk.unlock();
    for (auto& e : entities_)
        if (e->thread.joinable()) e->thread.join();
    if (first_error_) std::rethrow_exception(std::exchange(first_error_, nullptr));
}

std::unique_ptr<ExecContext> make_context(ClockMode mode) {
    if (mode == ClockMode::kSim) return std::make_unique<CoopScheduler>();
    return std::make_unique<WallContext>();
}

}  // namespace llmvox
