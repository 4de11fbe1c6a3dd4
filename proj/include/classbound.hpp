#ifndef CLASSBOUND_HPP
#define CLASSBOUND_HPP

#include "classbound/bound.hpp"
#include "classbound/error.hpp"
#include "classbound/factor.hpp"
#include "classbound/field.hpp"
#include "classbound/lattice.hpp"
#include "classbound/ledger.hpp"
#include "classbound/modular.hpp"
#include "classbound/mp.hpp"
#include "classbound/pipeline.hpp"
#include "classbound/roots.hpp"
#include "classbound/search.hpp"
#include "classbound/sparse.hpp"
#include "classbound/splitting.hpp"
#include "classbound/taylor.hpp"

#endif // CLASSBOUND_HPP
