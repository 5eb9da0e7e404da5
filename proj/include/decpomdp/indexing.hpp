#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace decpomdp {

/// Row-major mixed-radix encoding of index vectors. Position 0 is the most
/// significant digit, so flat = sum_k v[k] * prod_{j>k} radix[j].
class MixedRadix {
public:
    MixedRadix() = default;
    explicit MixedRadix(std::vector<std::size_t> radices);
    /// K positions sharing the same radix.
    MixedRadix(std::size_t positions, std::size_t radix);

    std::size_t positions() const noexcept { return radices_.size(); }
    std::size_t size() const noexcept { return size_; }
    std::size_t radix(std::size_t k) const { return radices_[k]; }
    /// Weight of position k in the flat encoding.
    std::size_t stride(std::size_t k) const { return strides_[k]; }

    std::size_t encode(std::span<const std::size_t> digits) const;
    std::vector<std::size_t> decode(std::size_t flat) const;
    void decode(std::size_t flat, std::span<std::size_t> out) const;
    std::size_t digit(std::size_t flat, std::size_t k) const {
        return (flat / strides_[k]) % radices_[k];
    }

    /// Every flat index decoded once; entry [flat * positions() + k].
    std::vector<std::size_t> digit_table() const;

private:
    std::vector<std::size_t> radices_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 1;
};

/// Joint-action index: K per-agent action indices and their flat encoding.
struct JointActionIndex {
    std::vector<std::size_t> components;
    std::size_t flat = 0;

    static JointActionIndex from_components(std::vector<std::size_t> components,
                                            std::size_t num_actions);
    static JointActionIndex from_flat(std::size_t flat, std::size_t num_agents,
                                      std::size_t num_actions);
};

/// "1-0-2" style rendering used in traces.
std::string dash_join(std::span<const std::size_t> digits);

} // namespace decpomdp
