#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sponsored/errors.hpp"
#include "sponsored/rational.hpp"

namespace sponsored {

/// Priority order used to resolve argmax ties. An empty policy means index
/// order (the instance's insertion order).
class TiePolicy {
public:
    TiePolicy() = default;

    /// `priority` lists indices from most to least preferred and must be a
    /// permutation of 0..n-1.
    explicit TiePolicy(std::vector<std::size_t> priority) : rank_(priority.size()) {
        std::vector<bool> seen(priority.size(), false);
        for (std::size_t pos = 0; pos < priority.size(); ++pos) {
            const auto idx = priority[pos];
            if (idx >= priority.size() || seen[idx])
                throw ParameterError("tie priority is not a permutation");
            seen[idx] = true;
            rank_[idx] = pos;
        }
    }

    /// Builds a policy from a (possibly partial) ordering of labels; labels not
    /// mentioned follow in their original order.
    static TiePolicy from_labels(const std::vector<std::string>& universe, const std::vector<std::string>& ordering) {
        std::vector<std::size_t> priority;
        std::vector<bool> used(universe.size(), false);
        for (const auto& label : ordering) {
            std::size_t idx = universe.size();
            for (std::size_t i = 0; i < universe.size(); ++i)
                if (universe[i] == label) idx = i;
            if (idx == universe.size()) throw LookupError("unknown tie-breaking label '" + label + "'");
            if (used[idx]) throw ParameterError("label '" + label + "' repeated in tie order");
            used[idx] = true;
            priority.push_back(idx);
        }
        for (std::size_t i = 0; i < universe.size(); ++i)
            if (!used[i]) priority.push_back(i);
        return TiePolicy(std::move(priority));
    }

    bool is_default() const { return rank_.empty(); }

    std::size_t rank(std::size_t index) const {
        if (rank_.empty()) return index;
        if (index >= rank_.size()) throw LookupError("tie policy does not cover index " + std::to_string(index));
        return rank_[index];
    }

    /// Checks the policy is usable for `n` candidates.
    void check(std::size_t n) const {
        if (!rank_.empty() && rank_.size() != n)
            throw ParameterError("tie policy covers " + std::to_string(rank_.size()) + " labels, expected " +
                                 std::to_string(n));
    }

    /// Index of the maximum of `values`; among equal maxima the one with the
    /// best rank. `values` must be non-empty.
    std::size_t argmax(std::span<const Rational> values) const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < values.size(); ++i) {
            if (values[i] > values[best] || (values[i] == values[best] && rank(i) < rank(best))) best = i;
        }
        return best;
    }

    /// Like argmax, but no index when every value is zero or negative.
    std::optional<std::size_t> positive_argmax(std::span<const Rational> values) const {
        if (values.empty()) return std::nullopt;
        const auto best = argmax(values);
        if (!values[best].is_positive()) return std::nullopt;
        return best;
    }

    /// Candidate order from most to least preferred.
    std::vector<std::size_t> order(std::size_t n) const {
        std::vector<std::size_t> out(n);
        for (std::size_t i = 0; i < n; ++i) out[rank(i)] = i;
        return out;
    }

private:
    std::vector<std::size_t> rank_;
};

/// Tie policies for the two argmaxes every mechanism performs.
struct TieBreaking {
    TiePolicy questions;
    TiePolicy advertisers;
};

}  // namespace sponsored
