#pragma once

#include <cstdint>
#include <cstddef>
#include <utility>
#include <vector>

namespace pfb {

// Open-addressing hash table for packed DP state keys. Packed keys stay
// below 2^62, so the all-ones key marks an empty slot. The programs only
// insert and update states, never erase.
template <typename Entry>
class StateMap {
public:
    static constexpr std::uint64_t kEmptyKey = ~std::uint64_t{0};

    StateMap() { slots_.resize(16); }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    void reserve(std::size_t n) {
        std::size_t cap = slots_.size();
        while (n * 10 >= cap * 7) cap *= 2;
        if (cap != slots_.size()) rehash_to(cap);
    }

    Entry* find(std::uint64_t key) {
        std::size_t i = index_of(key);
        return slots_[i].key == kEmptyKey ? nullptr : &slots_[i].value;
    }
    const Entry* find(std::uint64_t key) const {
        std::size_t i = index_of(key);
        return slots_[i].key == kEmptyKey ? nullptr : &slots_[i].value;
    }

    // Default-constructs the entry on first insertion.
    std::pair<Entry*, bool> emplace(std::uint64_t key) {
        if ((size_ + 1) * 10 >= slots_.size() * 7) rehash_to(slots_.size() * 2);
        std::size_t i = index_of(key);
        if (slots_[i].key != kEmptyKey) return {&slots_[i].value, false};
        slots_[i].key = key;
        ++size_;
        return {&slots_[i].value, true};
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (const Slot& s : slots_)
            if (s.key != kEmptyKey) fn(s.key, s.value);
    }
    template <typename Fn>
    void for_each_mutable(Fn&& fn) {
        for (Slot& s : slots_)
            if (s.key != kEmptyKey) fn(s.key, s.value);
    }

private:
    struct Slot {
        std::uint64_t key = kEmptyKey;
        Entry value{};
    };

    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::size_t index_of(std::uint64_t key) const {
        const std::size_t mask = slots_.size() - 1;
        std::size_t i = static_cast<std::size_t>(mix(key)) & mask;
        while (slots_[i].key != kEmptyKey && slots_[i].key != key) i = (i + 1) & mask;
        return i;
    }

    void rehash_to(std::size_t cap) {
        std::vector<Slot> old = std::move(slots_);
        slots_.assign(cap, Slot{});
        for (Slot& s : old) {
            if (s.key == kEmptyKey) continue;
            std::size_t i = index_of(s.key);
            slots_[i] = std::move(s);
        }
    }

    std::vector<Slot> slots_;
    std::size_t size_ = 0;
};

}  // namespace pfb
