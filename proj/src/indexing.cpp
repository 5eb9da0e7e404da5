#include "decpomdp/indexing.hpp"

#include "decpomdp/errors.hpp"

namespace decpomdp {

MixedRadix::MixedRadix(std::vector<std::size_t> radices) : radices_(std::move(radices)) {
    strides_.assign(radices_.size(), 1);
    size_ = 1;
    for (std::size_t k = radices_.size(); k-- > 0;) {
        if (radices_[k] == 0) throw DimensionError("mixed radix with zero-size position");
        strides_[k] = size_;
        size_ *= radices_[k];
    }
}

MixedRadix::MixedRadix(std::size_t positions, std::size_t radix)
    : MixedRadix(std::vector<std::size_t>(positions, radix)) {}

std::size_t MixedRadix::encode(std::span<const std::size_t> digits) const {
    if (digits.size() != radices_.size())
        throw DimensionError("index vector has length " + std::to_string(digits.size()) +
                             ", expected " + std::to_string(radices_.size()));
    std::size_t flat = 0;
    for (std::size_t k = 0; k < digits.size(); ++k) {
        if (digits[k] >= radices_[k])
            throw IndexError("component " + std::to_string(k), digits[k], radices_[k]);
        flat += digits[k] * strides_[k];
    }
    return flat;
}

void MixedRadix::decode(std::size_t flat, std::span<std::size_t> out) const {
    if (flat >= size_) throw IndexError("flat", flat, size_);
    for (std::size_t k = 0; k < radices_.size(); ++k) out[k] = (flat / strides_[k]) % radices_[k];
}

std::vector<std::size_t> MixedRadix::decode(std::size_t flat) const {
    std::vector<std::size_t> out(radices_.size());
    decode(flat, out);
    return out;
}

std::vector<std::size_t> MixedRadix::digit_table() const {
    const std::size_t K = radices_.size();
    std::vector<std::size_t> table(size_ * K);
    for (std::size_t f = 0; f < size_; ++f)
        for (std::size_t k = 0; k < K; ++k) table[f * K + k] = (f / strides_[k]) % radices_[k];
    return table;
}

JointActionIndex JointActionIndex::from_components(std::vector<std::size_t> components,
                                                   std::size_t num_actions) {
    MixedRadix radix(components.size(), num_actions);
    const std::size_t flat = radix.encode(components);
    return {std::move(components), flat};
}

JointActionIndex JointActionIndex::from_flat(std::size_t flat, std::size_t num_agents,
                                             std::size_t num_actions) {
    MixedRadix radix(num_agents, num_actions);
    return {radix.decode(flat), flat};
}

std::string dash_join(std::span<const std::size_t> digits) {
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i) out += '-';
        out += std::to_string(digits[i]);
    }
    return out;
}

} // namespace decpomdp
