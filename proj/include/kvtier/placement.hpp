#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kvtier/chunk.hpp"
#include "kvtier/error.hpp"
#include "kvtier/hotness.hpp"
#include "kvtier/lru.hpp"

namespace kvtier {

enum class Tier : std::uint8_t { Gpu = 0, Pin = 1, Page = 2, Disk = 3 };

// Hops on the path disk -> pageable host -> pinned host -> device.
enum class Link : std::uint8_t { DiskToPage = 0, PageToPin = 1, PinToGpu = 2 };

constexpr std::string_view to_string(Tier t) noexcept {
    switch (t) {
        case Tier::Gpu: return "gpu";
        case Tier::Pin: return "pin";
        case Tier::Page: return "page";
        case Tier::Disk: return "disk";
    }
    return "?";
}

struct Transfer {
    Link link;
    std::uint64_t bytes;
    friend bool operator==(const Transfer&, const Transfer&) = default;
};

struct Eviction {
    Tier tier;
    ChunkId id;
    friend bool operator==(const Eviction&, const Eviction&) = default;
};

struct AccessOutcome {
    ChunkId id = 0;
    Tier hit_tier = Tier::Disk;
    std::vector<Transfer> transfers;
    std::vector<Eviction> evictions;
    friend bool operator==(const AccessOutcome&, const AccessOutcome&) = default;
};

/// Static hotness lists: which residency queue, if any, may cache each chunk.
struct TierListAssignment {
    std::vector<ChunkId> gpu_list;
    std::vector<ChunkId> pin_list;
    std::vector<ChunkId> page_list;
    std::vector<ChunkId> disk_list;
    std::unordered_map<ChunkId, Tier> tier_of;

    bool contains(ChunkId id) const { return tier_of.count(id) != 0; }

    Tier list_of(ChunkId id) const {
        const auto it = tier_of.find(id);
        if (it == tier_of.end()) throw InvalidArgument("unknown chunk id " + std::to_string(id));
        return it->second;
    }
};

/// Slice a hotness-ranked id list into the four tier lists. tau_pin sizes the
/// pinned list and tau_page the pageable list.
inline TierListAssignment build_lists(std::span<const ChunkId> sorted_ids, double tau_gpu,
                                      double tau_pin, double tau_page) {
    const auto idx = threshold_boundaries(sorted_ids.size(), {tau_gpu, tau_pin, tau_page});
    TierListAssignment a;
    for (std::size_t i = 0; i < sorted_ids.size(); ++i) {
        const ChunkId id = sorted_ids[i];
        Tier t = Tier::Disk;
        if (i < idx[0]) t = Tier::Gpu;
        else if (i < idx[1]) t = Tier::Pin;
        else if (i < idx[2]) t = Tier::Page;
        switch (t) {
            case Tier::Gpu: a.gpu_list.push_back(id); break;
            case Tier::Pin: a.pin_list.push_back(id); break;
            case Tier::Page: a.page_list.push_back(id); break;
            case Tier::Disk: a.disk_list.push_back(id); break;
        }
        if (!a.tier_of.emplace(id, t).second) throw InvalidArgument("duplicate chunk id " + std::to_string(id));
    }
    return a;
}

struct TierCapacities {
    std::size_t gpu = 0;
    std::size_t pin = 0;
    std::size_t page = 0;
};

/// Residency of chunks across GPU memory, pinned host memory and pageable host
/// memory. Disk holds everything and is not modelled as a queue.
///
/// Caching is inclusive: promoting a chunk to a faster tier leaves the slower
/// copy in place. Every queue evicts its least recently used entry on overflow.
class PlacementState {
public:
    /// Capacities equal the list sizes.
    explicit PlacementState(TierListAssignment lists)
        : PlacementState(lists, {lists.gpu_list.size(), lists.pin_list.size(), lists.page_list.size()}) {}

    PlacementState(TierListAssignment lists, TierCapacities caps)
        : lists_(std::move(lists)), gpu_(caps.gpu), pin_(caps.pin), page_(caps.page) {}

    const TierListAssignment& lists() const noexcept { return lists_; }

    const LruQueue<ChunkId>& queue(Tier t) const {
        switch (t) {
            case Tier::Gpu: return gpu_;
            case Tier::Pin: return pin_;
            case Tier::Page: return page_;
            case Tier::Disk: break;
        }
        throw InvalidArgument("disk tier has no queue");
    }

    /// Serve one chunk request. `bytes` is the chunk's stored size and is
    /// reported on every transfer leg.
    AccessOutcome access(ChunkId id, std::uint64_t bytes = 0) {
        const Tier home = lists_.list_of(id);
        AccessOutcome out;
        out.id = id;

        if (gpu_.touch(id)) {
            out.hit_tier = Tier::Gpu;
        } else if (pin_.touch(id)) {
            out.hit_tier = Tier::Pin;
            out.transfers = {{Link::PinToGpu, bytes}};
            if (home == Tier::Gpu) insert(Tier::Gpu, id, out);
        } else if (page_.touch(id)) {
            out.hit_tier = Tier::Page;
            out.transfers = {{Link::PageToPin, bytes}, {Link::PinToGpu, bytes}};
            if (home == Tier::Gpu) insert(Tier::Gpu, id, out);
            if (home == Tier::Pin) insert(Tier::Pin, id, out);
        } else {
            out.hit_tier = Tier::Disk;
            out.transfers = {{Link::DiskToPage, bytes}, {Link::PageToPin, bytes}, {Link::PinToGpu, bytes}};
            if (home != Tier::Disk) insert(home, id, out);
        }
        check_capacities();
        return out;
    }

    /// Place a chunk directly into a queue, as if it had been loaded earlier.
    void seed(Tier t, ChunkId id) {
        lists_.list_of(id);
        AccessOutcome ignored;
        insert(t, id, ignored);
    }

    void reset() {
        gpu_.clear();
        pin_.clear();
        page_.clear();
    }

private:
    LruQueue<ChunkId>& mutable_queue(Tier t) {
        return const_cast<LruQueue<ChunkId>&>(std::as_const(*this).queue(t));
    }

    void insert(Tier t, ChunkId id, AccessOutcome& out) {
        if (const auto evicted = mutable_queue(t).put(id)) out.evictions.push_back({t, *evicted});
    }

    void check_capacities() const {
        for (const auto* q : {&gpu_, &pin_, &page_}) {
            if (q->size() > q->capacity()) throw InternalError("placement queue over capacity");
        }
    }

    TierListAssignment lists_;
    LruQueue<ChunkId> gpu_;
    LruQueue<ChunkId> pin_;
    LruQueue<ChunkId> page_;
};

}  // namespace kvtier
