#include "itb/potential.hpp"

#include <cmath>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "itb/errors.hpp"

namespace itb {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "cannot parse " + what + " from '" + text + "'");
  }
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void validate(const PotentialSpec& potential) {
  std::visit(overloaded{
                 [](const FreePotential&) {},
                 [](const LinearPotential& p) {
                   if (!std::isfinite(p.force)) fail(ErrorKind::InvalidArgument, "force must be finite");
                 },
                 [](const HarmonicPotential& p) {
                   if (!(p.omega > 0.0) || !std::isfinite(p.omega)) {
                     fail(ErrorKind::InvalidArgument, "harmonic omega must be > 0");
                   }
                 },
                 [](const PolynomialPotential& p) {
                   if (p.coefficients.size() > kMaxPolynomialDegree + 1) {
                     fail(ErrorKind::InvalidArgument, "polynomial degree exceeds 6");
                   }
                   for (double c : p.coefficients) {
                     if (!std::isfinite(c)) fail(ErrorKind::InvalidArgument, "non-finite coefficient");
                   }
                 },
             },
             potential);
}

PotentialValues potential_eval(const PotentialSpec& potential, double x, const Units& units) {
  return std::visit(
      overloaded{
          [](const FreePotential&) { return PotentialValues{}; },
          [x](const LinearPotential& p) { return PotentialValues{-p.force * x, -p.force, 0.0}; },
          [x, &units](const HarmonicPotential& p) {
            const double k = units.mass * p.omega * p.omega;
            return PotentialValues{0.5 * k * x * x, k * x, k};
          },
          [x](const PolynomialPotential& p) {
            // Horner for the value and both derivatives.
            PotentialValues r;
            const auto& c = p.coefficients;
            for (std::size_t i = c.size(); i-- > 0;) {
              r.d2v = r.d2v * x + 2.0 * r.dv;
              r.dv = r.dv * x + r.v;
              r.v = r.v * x + c[i];
            }
            return r;
          },
      },
      potential);
}

bool is_quadratic(const PotentialSpec& potential) {
  return !std::holds_alternative<PolynomialPotential>(potential);
}

PotentialSpec parse_potential(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);

  // Polynomial coefficient lists contain commas, so only split on ';'.
  auto value_of = [&](std::initializer_list<std::string_view> keys) -> std::string {
    std::istringstream is(args);
    std::string item;
    while (std::getline(is, item, ';')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) continue;
      for (auto key : keys) {
        if (item.substr(0, eq) == key) return item.substr(eq + 1);
      }
    }
    fail(ErrorKind::InvalidArgument,
         "potential '" + text + "' is missing " + std::string(*keys.begin()) + "=");
  };

  PotentialSpec spec;
  if (kind == "free") {
    spec = FreePotential{};
  } else if (kind == "linear") {
    spec = LinearPotential{parse_number(value_of({"force", "F"}), "force")};
  } else if (kind == "harmonic") {
    spec = HarmonicPotential{parse_number(value_of({"omega", "w"}), "omega")};
  } else if (kind == "polynomial" || kind == "poly") {
    PolynomialPotential poly;
    std::istringstream is(value_of({"c"}));
    std::string item;
    while (std::getline(is, item, ',')) poly.coefficients.push_back(parse_number(item, "coefficient"));
    spec = poly;
  } else {
    fail(ErrorKind::InvalidArgument, "unknown potential kind '" + kind + "'");
  }
  validate(spec);
  return spec;
}

std::string describe(const PotentialSpec& potential) {
  return std::visit(overloaded{
                        [](const FreePotential&) { return std::string("free"); },
                        [](const LinearPotential& p) { return "linear:force=" + format_number(p.force); },
                        [](const HarmonicPotential& p) { return "harmonic:omega=" + format_number(p.omega); },
                        [](const PolynomialPotential& p) {
                          std::string s = "polynomial:c=";
                          for (std::size_t i = 0; i < p.coefficients.size(); ++i) {
                            if (i) s += ',';
                            s += format_number(p.coefficients[i]);
                          }
                          return s;
                        },
                    },
                    potential);
}

}  // namespace itb
