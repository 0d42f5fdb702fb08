#include "sdprofile/time.hpp"

#include <cstdio>

#include "sdprofile/errors.hpp"

namespace sdprofile {
namespace {

using namespace std::chrono;

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    int digits(std::size_t n) {
        int value = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pos_ >= text_.size() || text_[pos_] < '0' || text_[pos_] > '9')
                fail("expected digit");
            value = value * 10 + (text_[pos_++] - '0');
        }
        return value;
    }

    void expect(char c) {
        if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    bool accept(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    bool done() const { return pos_ == text_.size(); }
    void advance() { ++pos_; }

    [[noreturn]] void fail(const std::string& why) const {
        throw InvalidTimestamp("invalid RFC 3339 timestamp \"" + std::string(text_) + "\": " + why);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
    Cursor cur(text);
    const int y = cur.digits(4);
    cur.expect('-');
    const int mo = cur.digits(2);
    cur.expect('-');
    const int d = cur.digits(2);
    if (!(cur.accept('T') || cur.accept('t') || cur.accept(' '))) cur.fail("expected 'T'");
    const int hh = cur.digits(2);
    cur.expect(':');
    const int mm = cur.digits(2);
    cur.expect(':');
    const int ss = cur.digits(2);

    int millis = 0;
    if (cur.accept('.')) {
        int scale = 100;
        bool any = false;
        while (cur.peek() >= '0' && cur.peek() <= '9') {
            millis += (cur.peek() - '0') * scale;
            scale /= 10;
            any = true;
            cur.advance();
        }
        if (!any) cur.fail("empty fraction");
    }

    int offset_minutes = 0;
    if (cur.accept('Z') || cur.accept('z')) {
    } else if (cur.peek() == '+' || cur.peek() == '-') {
        const int sign = cur.peek() == '-' ? -1 : 1;
        cur.advance();
        const int oh = cur.digits(2);
        cur.expect(':');
        const int om = cur.digits(2);
        if (oh > 23 || om > 59) cur.fail("offset out of range");
        offset_minutes = sign * (oh * 60 + om);
    } else {
        cur.fail("missing time zone offset");
    }
    if (!cur.done()) cur.fail("trailing characters");

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) cur.fail("no such calendar date");
    // 60 admits a leap second; it is folded into the next minute.
    if (hh > 23 || mm > 59 || ss > 60) cur.fail("time of day out of range");

    return Timestamp{sys_days{ymd}} + hours{hh} + minutes{mm} + seconds{ss} + milliseconds{millis} -
           minutes{offset_minutes};
}

std::string format_rfc3339(Timestamp t) {
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss tod{t - day};
    char buf[40];
    const auto ms = tod.subseconds().count();
    if (ms != 0) {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                      static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                      static_cast<int>(tod.seconds().count()), static_cast<int>(ms));
    } else {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                      static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                      static_cast<int>(tod.seconds().count()));
    }
    return buf;
}

std::string format_date(Timestamp t) {
    const year_month_day ymd{floor<days>(t)};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Timestamp now_utc() { return floor<milliseconds>(system_clock::now()); }

}  // namespace sdprofile
