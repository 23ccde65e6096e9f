"""
Base Case Component Module

This module provides the base class for the per-case mechanism builders.
"""

import logging
import time
from abc import ABC, abstractmethod

logger = logging.getLogger(__name__)


class CaseComponent(ABC):
    """Abstract base class for the builders of one case's candidate mechanism"""

    def __init__(self, name, case):
        """
        Initialize the case component

        Args:
            name (str): Component name
            case (str): Case label whose tasks this component receives
        """
        self.name = name
        self.case = case

    def process(self, inst, ground, **kwargs):
        """
        Build the candidate for one case

        Args:
            inst: Instance with budget 1
            ground (frozenset): Task ids of this case
            **kwargs: Additional arguments

        Returns:
            dict: Processing results, with the candidate under 'mechanism'
        """
        logger.info(f"Building case '{self.case}' ({len(ground)} tasks) with component '{self.name}'")

        start_time = time.time()
        result = {
            'component': self.name,
            'case': self.case,
            'success': False,
            'time': 0,
            'message': '',
            'mechanism': None,
            'value': 0.0,
        }

        try:
            if not ground:
                result.update({'success': True, 'message': 'no tasks in this case'})
            else:
                result.update(self.build_candidate(inst, ground, **kwargs))

            execution_time = time.time() - start_time
            result['time'] = f"{execution_time:.2f}s"

            if result.get('success', False):
                logger.info(f"Component '{self.name}' built case '{self.case}' in {result['time']}")
            else:
                logger.warning(f"Component '{self.name}' failed on case '{self.case}' in {result['time']}")

            return result

        except Exception as e:
            execution_time = time.time() - start_time
            logger.error(f"Error in component '{self.name}' building case '{self.case}': {str(e)}")

            result.update({
                'success': False,
                'time': f"{execution_time:.2f}s",
                'message': f"Error: {str(e)}"
            })

            return result

    @abstractmethod
    def build_candidate(self, inst, ground, **kwargs):
        """
        Build the candidate (to be implemented by subclasses)

        Args:
            inst: Instance with budget 1
            ground (frozenset): Nonempty task ids of this case
            **kwargs: Additional arguments

        Returns:
            dict: At least 'success', 'mechanism' and 'value'
        """
        pass
