#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ctxcent/error.hpp"
#include "ctxcent/vec.hpp"

namespace ctxcent {

// Per-node payoff contributions y with mean, population standard deviation,
// and z-scores (zero when the vector is constant).
class ContributionVector {
public:
    explicit ContributionVector(Vec y) : y_(std::move(y)) {
        if (y_.empty())
            throw ValidationError("contribution vector: empty");
        if (!vec::all_finite(y_))
            throw ValidationError("contribution vector: non-finite entry");
        mean_ = vec::mean(y_);
        std_ = vec::population_std(y_);
        z_.resize(y_.size(), 0.0);
        if (std_ > 0)
            for (std::size_t i = 0; i < y_.size(); ++i)
                z_[i] = (y_[i] - mean_) / std_;
    }

    static ContributionVector constant(std::size_t n, double value) {
        return ContributionVector(Vec(n, value));
    }

    static ContributionVector ones(std::size_t n) { return constant(n, 1.0); }

    const Vec& values() const noexcept { return y_; }
    double mean() const noexcept { return mean_; }
    double stddev() const noexcept { return std_; }
    const Vec& zscores() const noexcept { return z_; }
    std::size_t size() const noexcept { return y_.size(); }

private:
    Vec y_;
    double mean_ = 0.0;
    double std_ = 0.0;
    Vec z_;
};

// CSV with header "node,y". Every node 0..max must be present exactly once;
// gaps are an error rather than zero-filled.
inline ContributionVector load_contributions_csv(const std::string& text) {
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    std::vector<std::pair<long, double>> rows;
    while (std::getline(stream, line)) {
        ++line_no;
        // Trim whitespace and skip blanks.
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos)
            continue;
        const auto end = line.find_last_not_of(" \t\r");
        std::string trimmed = line.substr(begin, end - begin + 1);
        if (!saw_header) {
            std::string squashed;
            for (char c : trimmed)
                if (c != ' ' && c != '\t')
                    squashed += c;
            if (squashed != "node,y")
                throw ValidationError(
                    "contributions line " + std::to_string(line_no) +
                    ": expected header \"node,y\"");
            saw_header = true;
            continue;
        }
        const auto comma = trimmed.find(',');
        if (comma == std::string::npos)
            throw ValidationError("contributions line " +
                                  std::to_string(line_no) + ": expected node,y");
        try {
            std::size_t used = 0;
            std::string node_text = trimmed.substr(0, comma);
            while (!node_text.empty() && node_text.back() == ' ')
                node_text.pop_back();
            const long node = std::stol(node_text, &used);
            if (used != node_text.size())
                throw ValidationError("contributions line " +
                                      std::to_string(line_no) +
                                      ": malformed node id");
            std::string value_text = trimmed.substr(comma + 1);
            const auto start = value_text.find_first_not_of(" \t");
            value_text = start == std::string::npos ? ""
                                                    : value_text.substr(start);
            const double value = std::stod(value_text, &used);
            if (used != value_text.size())
                throw ValidationError("contributions line " +
                                      std::to_string(line_no) +
                                      ": malformed value");
            if (node < 0)
                throw ValidationError("contributions line " +
                                      std::to_string(line_no) +
                                      ": negative node id");
            rows.emplace_back(node, value);
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception&) {
            throw ValidationError("contributions line " +
                                  std::to_string(line_no) +
                                  ": malformed number");
        }
    }
    if (!saw_header)
        throw ValidationError("contributions: missing \"node,y\" header");
    if (rows.empty())
        throw ValidationError("contributions: no data rows");
    long max_node = 0;
    for (const auto& [node, value] : rows)
        max_node = std::max(max_node, node);
    Vec y(static_cast<std::size_t>(max_node) + 1, 0.0);
    std::vector<bool> seen(y.size(), false);
    for (const auto& [node, value] : rows) {
        const std::size_t i = static_cast<std::size_t>(node);
        if (seen[i])
            throw ValidationError("contributions: duplicate node " +
                                  std::to_string(node));
        seen[i] = true;
        y[i] = value;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw ValidationError("contributions: missing node " +
                                  std::to_string(i));
    return ContributionVector(std::move(y));
}

inline ContributionVector load_contributions_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open contributions file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_contributions_csv(buf.str());
}

} // namespace ctxcent
