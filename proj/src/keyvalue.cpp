#include "riskdyn/keyvalue.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "riskdyn/errors.hpp"

namespace riskdyn {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueDocument KeyValueDocument::parse(std::istream& in) {
    KeyValueDocument doc;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParseError(line_no, "malformed section header");
            }
            const std::string name(trim(line.substr(1, line.size() - 2)));
            for (const auto& s : doc.sections_) {
                if (s.name == name) {
                    throw ParseError(line_no, "duplicate section [" + name + "]");
                }
            }
            doc.sections_.push_back({name, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(line_no, "expected 'key = value'");
        }
        if (doc.sections_.empty()) {
            throw ParseError(line_no, "key outside of any section");
        }
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) {
            throw ParseError(line_no, "empty key");
        }
        auto& entries = doc.sections_.back().entries;
        for (const auto& e : entries) {
            if (e.key == key) {
                throw ParseError(line_no, "duplicate key '" + key + "'");
            }
        }
        entries.push_back({key, std::string(trim(line.substr(eq + 1))), line_no});
    }
    return doc;
}

void KeyValueDocument::write(std::ostream& out, const std::vector<std::string>& comment) const {
    for (const auto& c : comment) {
        out << "# " << c << '\n';
    }
    bool first = true;
    for (const auto& section : sections_) {
        if (!first || !comment.empty()) {
            out << '\n';
        }
        first = false;
        out << '[' << section.name << "]\n";
        for (const auto& e : section.entries) {
            out << e.key << (e.value.empty() ? " =" : " = ") << e.value << '\n';
        }
    }
}

const std::string* KeyValueDocument::find(std::string_view section, std::string_view key) const {
    for (const auto& s : sections_) {
        if (s.name != section) {
            continue;
        }
        for (const auto& e : s.entries) {
            if (e.key == key) {
                return &e.value;
            }
        }
    }
    return nullptr;
}

const KeyValueDocument::Entry& KeyValueDocument::require(std::string_view section,
                                                         std::string_view key) const {
    for (const auto& s : sections_) {
        if (s.name != section) {
            continue;
        }
        for (const auto& e : s.entries) {
            if (e.key == key) {
                return e;
            }
        }
    }
    throw ParseError(0, "missing key " + std::string(section) + "." + std::string(key));
}

void KeyValueDocument::set(std::string_view section, std::string_view key, std::string value) {
    for (auto& s : sections_) {
        if (s.name != section) {
            continue;
        }
        for (auto& e : s.entries) {
            if (e.key == key) {
                e.value = std::move(value);
                return;
            }
        }
        s.entries.push_back({std::string(key), std::move(value), 0});
        return;
    }
    sections_.push_back({std::string(section), {{std::string(key), std::move(value), 0}}});
}

bool parse_finite_double(std::string_view text, double& out) {
    if (text.empty()) {
        return false;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return false;
    }
    out = value;
    return true;
}

std::string format_g17(double value) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(n));
}

std::string format_shortest(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

}  // namespace riskdyn
