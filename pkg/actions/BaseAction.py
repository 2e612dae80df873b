class BaseAction:
    def __init__(self, name, description, action):
        self.name = name
        self.description = description
        self.action = action

    def __str__(self):
        return self.name + " - " + self.description

    def __repr__(self):
        return self.name + " - " + self.description

    def add_arguments(self, parser):
        pass

    def __call__(self, args) -> int:
        return self.action(args)
