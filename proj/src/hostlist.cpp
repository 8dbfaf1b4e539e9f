#include "gputrace/hostlist.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <iomanip>

namespace gputrace {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

long long parse_number(std::string_view s, const std::string& expr) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw HostlistError("bad range bound '" + std::string(s) + "' in '" + expr + "'");
    return v;
}

std::string pad_number(long long v, std::size_t width) {
    std::ostringstream os;
    os << std::setw(static_cast<int>(width)) << std::setfill('0') << v;
    return os.str();
}

// Splits on commas that are outside brackets.
std::vector<std::string> split_segments(const std::string& expr) {
    std::vector<std::string> segs;
    std::string cur;
    int depth = 0;
    for (char c : expr) {
        if (c == '[') ++depth;
        if (c == ']') --depth;
        if (depth < 0) throw HostlistError("unbalanced ']' in '" + expr + "'");
        if (c == ',' && depth == 0) {
            segs.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (depth != 0) throw HostlistError("unbalanced '[' in '" + expr + "'");
    segs.push_back(cur);
    return segs;
}

void expand_segment(const std::string& seg, const std::string& expr,
                    std::vector<std::string>& out) {
    auto open = seg.find('[');
    if (open == std::string::npos) {
        if (seg.find(']') != std::string::npos)
            throw HostlistError("unbalanced ']' in '" + expr + "'");
        if (seg.empty()) throw HostlistError("empty segment in '" + expr + "'");
        out.push_back(seg);
        return;
    }
    auto close = seg.find(']', open);
    if (close == std::string::npos) throw HostlistError("unbalanced '[' in '" + expr + "'");
    if (seg.find('[', open + 1) != std::string::npos)
        throw HostlistError("nested bracket group in '" + expr + "'");
    if (close != seg.size() - 1)
        throw HostlistError("text after ']' in '" + expr + "'");

    const std::string prefix = seg.substr(0, open);
    const std::string ranges = seg.substr(open + 1, close - open - 1);
    if (ranges.empty()) throw HostlistError("empty bracket group in '" + expr + "'");

    std::string item;
    std::istringstream rs(ranges);
    while (std::getline(rs, item, ',')) {
        auto dash = item.find('-');
        if (dash == std::string::npos) {
            if (!all_digits(item))
                throw HostlistError("non-numeric range item '" + item + "' in '" + expr + "'");
            out.push_back(prefix + item);
            continue;
        }
        const std::string lo = item.substr(0, dash);
        const std::string hi = item.substr(dash + 1);
        if (!all_digits(lo) || !all_digits(hi))
            throw HostlistError("non-numeric range item '" + item + "' in '" + expr + "'");
        long long a = parse_number(lo, expr);
        long long b = parse_number(hi, expr);
        if (a > b)
            throw HostlistError("reversed range '" + item + "' in '" + expr + "'");
        for (long long v = a; v <= b; ++v) out.push_back(prefix + pad_number(v, lo.size()));
    }
}

// Splits a node name into prefix and trailing digit run.
struct NodeParts {
    std::string prefix;
    std::string digits;  // empty when the name has no numeric tail
};

NodeParts split_name(const std::string& name) {
    std::size_t i = name.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(name[i - 1]))) --i;
    return {name.substr(0, i), name.substr(i)};
}

}  // namespace

std::vector<std::string> expand_hostlist(const std::string& expr) {
    std::vector<std::string> out;
    for (const auto& seg : split_segments(expr)) expand_segment(seg, expr, out);
    // De-duplicate, keeping first occurrence.
    std::set<std::string> seen;
    std::vector<std::string> unique;
    unique.reserve(out.size());
    for (auto& n : out) {
        if (seen.insert(n).second) unique.push_back(std::move(n));
    }
    return unique;
}

std::string compress_hostlist(const std::vector<std::string>& nodes) {
    struct Run {
        std::string prefix;
        std::size_t width = 0;
        long long lo = 0, hi = 0;
        bool numeric = false;
        std::string literal;  // for names without a numeric tail
    };
    std::vector<Run> runs;
    for (const auto& name : nodes) {
        NodeParts p = split_name(name);
        if (p.digits.empty()) {
            runs.push_back({"", 0, 0, 0, false, name});
            continue;
        }
        long long v = parse_number(p.digits, name);
        if (!runs.empty() && runs.back().numeric && runs.back().prefix == p.prefix &&
            runs.back().width == p.digits.size() && v == runs.back().hi + 1) {
            runs.back().hi = v;
        } else {
            runs.push_back({p.prefix, p.digits.size(), v, v, true, ""});
        }
    }
    std::string out;
    for (const auto& r : runs) {
        if (!out.empty()) out += ',';
        if (!r.numeric) {
            out += r.literal;
        } else if (r.lo == r.hi) {
            out += r.prefix + pad_number(r.lo, r.width);
        } else {
            out += r.prefix + "[" + pad_number(r.lo, r.width) + "-" + pad_number(r.hi, r.width) + "]";
        }
    }
    return out;
}

}  // namespace gputrace
