#include "tempora/time.hpp"

#include <cctype>
#include <cstdlib>

namespace tempora {

namespace {
__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0)
    a = -a;
  if (b < 0)
    b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}
constexpr long long kMax = 0x7fffffffffffffffLL;
} // namespace

Time Time::make(__int128 n, __int128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (n > kMax || n < -kMax || d > kMax)
    throw std::overflow_error("Time: rational overflow");
  Time t;
  t.num_ = static_cast<long long>(n);
  t.den_ = static_cast<long long>(d);
  return t;
}

Time Time::parse(const std::string &s) {
  if (s.empty())
    throw std::invalid_argument("Time::parse: empty string");
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '-' || s[i] == '+') {
    neg = s[i] == '-';
    ++i;
  }
  __int128 num = 0;
  bool any = false;
  for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
    num = num * 10 + (s[i] - '0');
    if (num > (__int128)kMax * 1000000)
      throw std::overflow_error("Time::parse: overflow");
    any = true;
  }
  __int128 den = 1;
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
         ++i) {
      num = num * 10 + (s[i] - '0');
      den *= 10;
      if (num > (__int128)kMax * 1000000 || den > kMax)
        throw std::overflow_error("Time::parse: overflow");
      any = true;
    }
  } else if (i < s.size() && s[i] == '/') {
    ++i;
    __int128 d = 0;
    bool dany = false;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
         ++i) {
      d = d * 10 + (s[i] - '0');
      dany = true;
    }
    if (!dany || d == 0)
      throw std::invalid_argument("Time::parse: bad denominator in '" + s +
                                  "'");
    den = d;
  }
  if (!any || i != s.size())
    throw std::invalid_argument("Time::parse: bad number '" + s + "'");
  return make(neg ? -num : num, den);
}

std::string Time::to_string() const {
  if (is_infinite())
    return "inf";
  if (den_ == 1)
    return std::to_string(num_);
  // Decimal expansion exists iff den has only factors 2 and 5.
  long long d = den_;
  int twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1)
    return std::to_string(num_) + "/" + std::to_string(den_);
  int k = twos > fives ? twos : fives;
  __int128 scaled = num_;
  for (int i = 0; i < k; ++i)
    scaled *= 10;
  scaled /= den_;
  bool neg = scaled < 0;
  if (neg)
    scaled = -scaled;
  std::string digits;
  if (scaled == 0)
    digits = "0";
  while (scaled > 0) {
    digits.insert(digits.begin(), static_cast<char>('0' + (int)(scaled % 10)));
    scaled /= 10;
  }
  while ((int)digits.size() <= k)
    digits.insert(digits.begin(), '0');
  std::string out = digits.substr(0, digits.size() - k) + "." +
                    digits.substr(digits.size() - k);
  while (out.back() == '0')
    out.pop_back();
  if (out.back() == '.')
    out.pop_back();
  return (neg ? "-" : "") + out;
}

std::string TimeWindow::to_string() const {
  std::string s = lo_strict ? "(" : "[";
  s += lo.to_string() + "," + hi.to_string();
  s += hi_strict ? ")" : "]";
  return s;
}

} // namespace tempora
