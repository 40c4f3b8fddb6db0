#ifndef TOPOCLUST_TOPOCLUST_HPP
#define TOPOCLUST_TOPOCLUST_HPP

#include "topoclust/barycenter.hpp"
#include "topoclust/cluster.hpp"
#include "topoclust/evaluate.hpp"
#include "topoclust/experiment.hpp"
#include "topoclust/filtration.hpp"
#include "topoclust/metric.hpp"
#include "topoclust/network.hpp"
#include "topoclust/parallel.hpp"
#include "topoclust/random.hpp"
#include "topoclust/simulate.hpp"

#endif
