#pragma once

#include <string>
#include <vector>

namespace heatopt {

// One named check. Pass/Fail carry an enforced bound; ReportOnly records a
// value whose reference bound has no computable constant; NotApplicable
// marks checks whose premise is empty for this input.
struct CheckRecord {
    enum class Status { Pass, Fail, ReportOnly, NotApplicable };

    std::string name;
    double value = 0.0;
    double bound = 0.0;
    Status status = Status::ReportOnly;
    std::string detail;

    static CheckRecord pass_fail(std::string name, double value, double bound, bool pass,
                                 std::string detail = {}) {
        return {std::move(name), value, bound, pass ? Status::Pass : Status::Fail,
                std::move(detail)};
    }
    static CheckRecord report(std::string name, double value, double bound,
                              std::string detail = {}) {
        return {std::move(name), value, bound, Status::ReportOnly, std::move(detail)};
    }
    static CheckRecord not_applicable(std::string name, std::string detail = {}) {
        return {std::move(name), 0.0, 0.0, Status::NotApplicable, std::move(detail)};
    }
};

struct Report {
    std::vector<CheckRecord> records;

    void add(CheckRecord r) { records.push_back(std::move(r)); }
    void append(const Report& other) {
        records.insert(records.end(), other.records.begin(), other.records.end());
    }

    const CheckRecord* find(const std::string& name) const {
        for (const auto& r : records)
            if (r.name == name) return &r;
        return nullptr;
    }

    bool all_passed() const {
        for (const auto& r : records)
            if (r.status == CheckRecord::Status::Fail) return false;
        return true;
    }

    std::size_t fail_count() const {
        std::size_t c = 0;
        for (const auto& r : records)
            if (r.status == CheckRecord::Status::Fail) ++c;
        return c;
    }
};

const char* to_string(CheckRecord::Status s);

} // namespace heatopt
