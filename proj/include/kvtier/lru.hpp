#pragma once

#include <cstddef>
#include <list>
#include <optional>
#include <unordered_map>
#include <vector>

namespace kvtier {

/// Bounded set ordered by recency, most recent at the front.
template <typename Key>
class LruQueue {
public:
    explicit LruQueue(std::size_t capacity = 0) : capacity_(capacity) {}

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return order_.size(); }
    bool empty() const noexcept { return order_.empty(); }
    bool contains(const Key& k) const { return index_.count(k) != 0; }

    /// Refresh recency of a resident key. Returns false if absent.
    bool touch(const Key& k) {
        const auto it = index_.find(k);
        if (it == index_.end()) return false;
        order_.splice(order_.begin(), order_, it->second);
        return true;
    }

    /// Insert (or refresh) a key. Returns the evicted key when the queue was
    /// full. A zero-capacity queue stores nothing.
    std::optional<Key> put(const Key& k) {
        if (touch(k) || capacity_ == 0) return std::nullopt;
        std::optional<Key> evicted;
        if (order_.size() == capacity_) {
            evicted = order_.back();
            index_.erase(order_.back());
            order_.pop_back();
        }
        order_.push_front(k);
        index_.emplace(k, order_.begin());
        return evicted;
    }

    void clear() {
        order_.clear();
        index_.clear();
    }

    /// Keys from most to least recently used.
    std::vector<Key> snapshot() const { return {order_.begin(), order_.end()}; }

private:
    std::size_t capacity_;
    std::list<Key> order_;
    std::unordered_map<Key, typename std::list<Key>::iterator> index_;
};

}  // namespace kvtier
