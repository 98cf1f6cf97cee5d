#include "crem/offspring.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace crem {

OffspringDistribution OffspringDistribution::binary() {
    return from_probabilities({0.0, 1.0});
}

OffspringDistribution OffspringDistribution::from_probabilities(std::vector<double> probs) {
    if (probs.empty()) throw DomainError("offspring distribution needs at least p_1");
    double sum = 0.0, mean = 0.0, k = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        double p = probs[i];
        if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("offspring probabilities must be finite and >= 0");
        double kk = static_cast<double>(i + 1);
        sum += p;
        mean += kk * p;
        k += kk * (kk - 1.0) * p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw DomainError("offspring probabilities must sum to 1");
    if (std::abs(mean - 2.0) > 1e-12) throw DomainError("offspring mean must equal 2");

    OffspringDistribution d;
    d.probs_ = std::move(probs);
    d.mean_ = mean;
    d.k_ = k;
    d.cdf_.resize(d.probs_.size());
    double c = 0.0;
    for (std::size_t i = 0; i < d.probs_.size(); ++i) {
        c += d.probs_[i];
        d.cdf_[i] = c;
    }
    d.cdf_.back() = 1.0;
    return d;
}

OffspringDistribution OffspringDistribution::parse(std::string_view spec) {
    if (spec == "binary") return binary();
    std::vector<double> probs;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) throw DomainError("empty entry in offspring list");
        probs.push_back(std::stod(cur));
        cur.clear();
    };
    for (char ch : spec) {
        if (ch == ',')
            flush();
        else if (!std::isspace(static_cast<unsigned char>(ch)))
            cur.push_back(ch);
    }
    flush();
    return from_probabilities(std::move(probs));
}

std::string OffspringDistribution::spec_string() const {
    if (probs_.size() == 2 && probs_[0] == 0.0 && probs_[1] == 1.0) return "binary";
    std::string out;
    char buf[32];
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        if (i) out += ',';
        std::snprintf(buf, sizeof buf, "%.17g", probs_[i]);
        out += buf;
    }
    return out;
}

}  // namespace crem
