#ifndef PSEUDOENT_PSEUDOENT_HPP
#define PSEUDOENT_PSEUDOENT_HPP

#include "pseudoent/clifford.hpp"
#include "pseudoent/ensembles.hpp"
#include "pseudoent/expansion.hpp"
#include "pseudoent/experiments.hpp"
#include "pseudoent/replica.hpp"
#include "pseudoent/seed.hpp"
#include "pseudoent/spinmodel.hpp"
#include "pseudoent/statesim.hpp"
#include "pseudoent/symgroup.hpp"
#include "pseudoent/tngraph.hpp"

#endif  // PSEUDOENT_PSEUDOENT_HPP
