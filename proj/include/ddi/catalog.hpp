#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "ddi/core.hpp"

namespace ddi {

// Canonical unordered drug pair: drug_lo < drug_hi lexicographically.
struct PairKey {
    std::string drug_lo;
    std::string drug_hi;

    PairKey() = default;
    PairKey(std::string a, std::string b) {
        if (a == b) throw std::invalid_argument("self-pair: " + a);
        if (b < a) std::swap(a, b);
        drug_lo = std::move(a);
        drug_hi = std::move(b);
    }

    auto operator<=>(const PairKey&) const = default;
};

struct DuplicateConflictingPair : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CatalogEntry {
    Severity severity = Severity::NotAvailable;
    std::string description;
};

// Symmetric known-DDI map; lookup is order-insensitive, no self-pairs.
class InteractionCatalog {
public:
    void add(const std::string& a, const std::string& b, Severity sev,
             const std::string& description = {}) {
        PairKey key(a, b);
        auto it = entries_.find(key);
        if (it != entries_.end()) {
            if (it->second.severity != sev)
                throw DuplicateConflictingPair(key.drug_lo + "/" + key.drug_hi);
            return;
        }
        entries_.emplace(std::move(key), CatalogEntry{sev, description});
    }

    bool contains(const std::string& a, const std::string& b) const {
        if (a == b) return false;
        return entries_.count(a < b ? PairKey(a, b) : PairKey(b, a)) > 0;
    }
    bool contains(const PairKey& key) const { return entries_.count(key) > 0; }

    std::optional<Severity> severity(const std::string& a, const std::string& b) const {
        if (a == b) return std::nullopt;
        auto it = entries_.find(PairKey(a, b));
        if (it == entries_.end()) return std::nullopt;
        return it->second.severity;
    }
    std::optional<Severity> severity(const PairKey& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second.severity;
    }

    const std::map<PairKey, CatalogEntry>& entries() const { return entries_; }
    size_t size() const { return entries_.size(); }

    std::set<std::string> drugs() const {
        std::set<std::string> out;
        for (const auto& [key, entry] : entries_) {
            out.insert(key.drug_lo);
            out.insert(key.drug_hi);
        }
        return out;
    }

private:
    std::map<PairKey, CatalogEntry> entries_;
};

}  // namespace ddi
